"""Simplicial maps, their point-inverse product cells and the algebraic Vietoris test."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import intmat
from .chain_algebra import (
    COSTAR,
    ContractibilityWitness,
    ContractionCertificate,
    GradedChainComplex,
    GradedChainMap,
    HomologyGroup,
    is_contractible,
    mapping_cone,
    simplicial_chain_complex,
)
from .duality import reduced_homology
from .errors import MalformedSimplexError, UnknownSimplexError
from .simplicial_core import Simplex, SimplicialComplex, boundary_faces, faces_of, perm_sign, simplex_key


@dataclass
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: dict[int, int]

    def image(self, s: Simplex) -> Simplex:
        return tuple(sorted({self.vertex_map[v] for v in s}))

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "vertex_map": [[v, self.vertex_map[v]] for v in sorted(self.vertex_map)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SimplicialMap":
        for key in ("source", "target", "vertex_map"):
            if key not in data:
                raise MalformedSimplexError(f"map file is missing the field {key!r}")
        source = SimplicialComplex.from_json(data["source"])
        target = SimplicialComplex.from_json(data["target"])
        vm = {}
        for k, pair in enumerate(data["vertex_map"]):
            try:
                a, b = pair
                vm[int(a)] = int(b)
            except (TypeError, ValueError) as exc:
                raise MalformedSimplexError(f"vertex_map[{k}] is not a [source, target] pair of integers") from exc
        return cls(source, target, vm)


def validate(f: SimplicialMap) -> bool:
    """Every source vertex is mapped to a target vertex and simplices go to simplices."""
    if set(f.vertex_map) != set(f.source.vertices):
        return False
    if not set(f.vertex_map.values()) <= set(f.target.vertices):
        return False
    return all(f.image(s) in f.target for s in f.source.maximal())


def _over(f: SimplicialMap, sigma: Simplex) -> list[Simplex]:
    """Source simplices whose image is exactly sigma, i.e. whose interiors map into the open simplex."""
    return [s for s in f.source.simplices if f.image(s) == sigma]


# ---------------------------------------------------------------- fibres


@dataclass
class FiberDecomposition:
    over: Simplex
    K: SimplicialComplex | None
    labels: dict[int, tuple[int, ...]] = field(default_factory=dict)
    witnesses: dict[Simplex, tuple[int, ...]] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.K is None

    def euler(self) -> int:
        if self.K is None:
            return 0
        return sum((-1) ** (len(s) - 1) for s in self.K.simplices)

    def to_json(self) -> dict:
        if self.K is None:
            return {"over": list(self.over), "empty": True}
        return {
            "over": list(self.over),
            "empty": False,
            "vertices": [[v, list(self.labels[v])] for v in sorted(self.labels)],
            "maximal": [list(s) for s in self.K.maximal()],
            "factor_ranks": [[list(s), list(r)] for s, r in sorted(self.witnesses.items(), key=lambda kv: simplex_key(kv[0]))],
        }


def _cell_euler(ranks: tuple[int, ...]) -> int:
    out = 1
    for r in ranks:
        out *= (-1) ** (r - 1)
    return out


def _staircase(factors: list[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    """Top simplices of Π Δ(factor): monotone lattice paths through the vertex grid."""
    sizes = [len(fac) for fac in factors]
    out = []
    steps = [i for i, m in enumerate(sizes) for _ in range(m - 1)]
    for perm in sorted(set(itertools.permutations(steps))):
        pos = [0] * len(factors)
        path = [tuple(fac[0] for fac in factors)]
        for i in perm:
            pos[i] += 1
            path.append(tuple(factors[k][pos[k]] for k in range(len(factors))))
        out.append(tuple(path))
    return out


def fiber(f: SimplicialMap, sigma: Simplex) -> FiberDecomposition:
    """K(sigma): glue the product cells Π Δ(ρ ∩ f^{-1}(w_i)) over source simplices onto sigma.

    Vertices of K are tuples (u_0, ..., u_k) with u_i over the i-th vertex of
    sigma; each product cell is triangulated by the staircase rule, which
    restricts to the staircase of every sub-product, so cells glue along
    shared faces.
    """
    sigma = tuple(sorted(sigma))
    if sigma not in f.target:
        raise UnknownSimplexError(f"{sigma} is not a simplex of the target")
    over = _over(f, sigma)
    if not over:
        return FiberDecomposition(sigma, None)
    over_set = set(over)
    tops = [s for s in over if not any(c != s and c in over_set for c in f.source.cofaces(s))]
    cells: dict[Simplex, tuple[int, ...]] = {}
    simplices: set[tuple[tuple[int, ...], ...]] = set()
    for rho in sorted(tops, key=simplex_key):
        factors = [tuple(v for v in rho if f.vertex_map[v] == w) for w in sigma]
        cells[rho] = tuple(len(fac) for fac in factors)
        for path in _staircase(factors):
            simplices.add(path)
    points = sorted({p for path in simplices for p in path})
    ids = {p: i for i, p in enumerate(points)}
    maximal = [tuple(sorted(ids[p] for p in path)) for path in simplices]
    closure = {face for m in maximal for face in faces_of(m)}
    K = SimplicialComplex(range(len(points)), closure)
    return FiberDecomposition(sigma, K, {i: p for p, i in ids.items()}, cells)


def all_cells(f: SimplicialMap, sigma: Simplex) -> dict[Simplex, tuple[int, ...]]:
    """Factor ranks for every source simplex onto sigma, not only the maximal ones."""
    return {rho: tuple(sum(1 for v in rho if f.vertex_map[v] == w) for w in sigma) for rho in _over(f, sigma)}


def predicted_euler(f: SimplicialMap, sigma: Simplex) -> int:
    """χ(K(sigma)) from the open product cells: each contributes Π (-1)^(r_i - 1)."""
    return sum(_cell_euler(r) for r in all_cells(f, tuple(sorted(sigma))).values())


@dataclass
class FiberVerdict:
    over: Simplex
    status: str  # "acyclic", "not acyclic" or "empty"
    witness: HomologyGroup | None = None

    def to_json(self) -> dict:
        out = {"over": list(self.over), "status": self.status}
        if self.witness is not None:
            out["witness"] = {"degree": self.witness.degree, "betti": self.witness.betti, "torsion": self.witness.torsion}
        return out


def fiber_acyclicity_report(f: SimplicialMap) -> list[FiberVerdict]:
    """Reduced homology of every K(sigma); acyclicity stands in for contractibility."""
    out = []
    for sigma in f.target.simplices:
        fd = fiber(f, sigma)
        if fd.empty:
            out.append(FiberVerdict(sigma, "empty"))
            continue
        bad = [h for _n, h in sorted(reduced_homology(list(fd.K.simplices)).items()) if not h.is_zero]
        out.append(FiberVerdict(sigma, "not acyclic", bad[0]) if bad else FiberVerdict(sigma, "acyclic"))
    return out


# ---------------------------------------------------------------- induced chain map


def preimage_chain_complex(f: SimplicialMap) -> GradedChainComplex:
    """Δ_*(f^{-1}(σ̊)) at each target σ: source simplices sit over their image."""
    return _preimage(f)[0]


def _preimage(f: SimplicialMap) -> tuple[GradedChainComplex, dict[Simplex, int]]:
    by_image: dict[Simplex, list[Simplex]] = {}
    for s in f.source.simplices:
        by_image.setdefault(f.image(s), []).append(s)
    index = {}
    ranks: dict = {}
    for sigma, ss in by_image.items():
        for s in ss:
            key = (sigma, len(s) - 1)
            index[s] = ranks.get(key, 0)
            ranks[key] = index[s] + 1
    diff: dict = {}
    for s in f.source.simplices:
        sigma, n = f.image(s), len(s) - 1
        for sign, face in boundary_faces(s):
            tau = f.image(face)
            key = (tau, sigma, n)
            if key not in diff:
                diff[key] = intmat.zeros(ranks[(tau, n - 1)], ranks[(sigma, n)])
            diff[key][index[face], index[s]] += sign
    return GradedChainComplex(f.target, COSTAR, ranks, diff), index


def induced_chain_map(f: SimplicialMap) -> GradedChainMap:
    """f_*: a source simplex mapped bijectively onto sigma goes to ±sigma, collapsed ones to 0."""
    C, index = _preimage(f)
    D = simplicial_chain_complex(f.target)
    blocks: dict = {}
    for s in f.source.simplices:
        sigma = f.image(s)
        if len(sigma) != len(s):
            continue
        n = len(s) - 1
        key = (sigma, sigma, n)
        if key not in blocks:
            blocks[key] = intmat.zeros(1, C.rank(sigma, n))
        blocks[key][0, index[s]] = perm_sign([f.vertex_map[v] for v in s])
    return GradedChainMap(C, D, blocks)


# ---------------------------------------------------------------- Vietoris


@dataclass
class VietorisVerdict:
    verdict: bool
    certificate: ContractionCertificate | None
    witness: ContractibilityWitness | None
    fibers: list[FiberVerdict]
    chain_map: GradedChainMap

    @property
    def routes_agree(self) -> bool:
        fibre_route = all(v.status == "acyclic" for v in self.fibers)
        return fibre_route == self.verdict

    def __bool__(self) -> bool:
        return self.verdict


def vietoris_verdict(f: SimplicialMap) -> VietorisVerdict:
    """cone(f_*) contractible in the costar variant, alongside the fibre route."""
    fs = induced_chain_map(f)
    res = is_contractible(mapping_cone(fs))
    fibers = fiber_acyclicity_report(f)
    if isinstance(res, ContractibilityWitness):
        return VietorisVerdict(False, None, res, fibers, fs)
    return VietorisVerdict(res.verified, res, None, fibers, fs)
