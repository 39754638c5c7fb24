"""Fundamental classes, cap products, Poincaré duality and homology manifolds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import intmat
from .chain_algebra import (
    FULL,
    STAR,
    ContractionCertificate,
    FreeComplex,
    GradedChainComplex,
    GradedChainMap,
    GradedHomotopy,
    HomologyGroup,
    HomologyWitness,
    dual,
    homology,
    homology_at,
    mapping_cone,
    simplicial_chain_complex,
    split_cone_homotopy,
    total_complex,
)
from .control_metrics import _coords_of, barycentre, package_bound
from .errors import NotPoincareDualityError, ParameterError
from .simplicial_core import (
    Simplex,
    SimplicialComplex,
    SubdividedComplex,
    boundary_faces,
    boundary_matrix,
    iterated_subdivision,
    simplex_key,
    squared_distance,
)

NON_PURE = "not-pure"
NON_PSEUDOMANIFOLD = "non-pseudomanifold"
NON_ORIENTABLE = "non-orientable"


# ---------------------------------------------------------------- fundamental class


@dataclass
class FundamentalClass:
    dimension: int
    coefficients: dict[Simplex, int]

    def vector(self, X: SimplicialComplex) -> np.ndarray:
        tops = X.of_dim(self.dimension)
        return intmat.as_int_matrix([[self.coefficients[s]] for s in tops])

    def is_cycle(self, X: SimplicialComplex) -> bool:
        if self.dimension == 0:
            return True
        return intmat.is_zero(boundary_matrix(X, self.dimension) @ self.vector(X))

    def to_json(self) -> dict:
        items = sorted(self.coefficients.items(), key=lambda kv: simplex_key(kv[0]))
        return {"dimension": self.dimension, "coefficients": [[list(s), c] for s, c in items]}


@dataclass
class OrientationFailure:
    reason: str
    simplex: Simplex | None = None

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"reason": self.reason, "simplex": list(self.simplex) if self.simplex is not None else None}


def fundamental_class(X: SimplicialComplex) -> FundamentalClass | OrientationFailure:
    """Solve for ±1 coefficients on the top simplices whose signed sum is a cycle.

    A codimension-one face lying in an odd number of top simplices can never
    cancel, so it is reported as a non-pseudomanifold face.  Even incidences
    above two (a wedge point of circles, say) are allowed and resolved by
    search; a contradiction means the complex is not orientable.
    """
    n = X.dim
    tops = X.of_dim(n)
    if not X.is_pure():
        bad = next(s for s in X.maximal() if len(s) - 1 != n)
        return OrientationFailure(NON_PURE, bad)
    if n == 0:
        return FundamentalClass(0, {s: 1 for s in tops})
    incident: dict[Simplex, list[tuple[Simplex, int]]] = {}
    for s in tops:
        for sign, f in boundary_faces(s):
            incident.setdefault(f, []).append((s, sign))
    for f in sorted(incident, key=simplex_key):
        if len(incident[f]) % 2:
            return OrientationFailure(NON_PSEUDOMANIFOLD, f)
    faces_of_top = {s: [f for _sign, f in boundary_faces(s)] for s in tops}

    # breadth-first order so constraints close early
    order: list[Simplex] = []
    seen: set[Simplex] = set()
    for root in tops:
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            s = queue.pop(0)
            order.append(s)
            for f in faces_of_top[s]:
                for t, _sign in incident[f]:
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)

    coeff: dict[Simplex, int] = {}

    def consistent(s: Simplex) -> bool:
        for f in faces_of_top[s]:
            total, free = 0, 0
            for t, sign in incident[f]:
                if t in coeff:
                    total += coeff[t] * sign
                else:
                    free += 1
            if abs(total) > free:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        s = order[k]
        for c in (1, -1):
            coeff[s] = c
            if consistent(s) and search(k + 1):
                return True
        del coeff[s]
        return False

    if not search(0):
        return OrientationFailure(NON_ORIENTABLE, None)
    return FundamentalClass(n, {s: coeff[s] for s in tops})


# ---------------------------------------------------------------- cap product


def cap_product(xi: Mapping[Simplex, int], p: int, c: Mapping[Simplex, int], n: int) -> dict[Simplex, int]:
    """Front-face/back-face cap: xi ∩ [v0..vn] = xi([v0..vp]) [vp..vn]."""
    if p < 0 or p > n:
        raise ParameterError(f"cannot cap a degree-{p} cochain with a degree-{n} chain")
    out: dict[Simplex, int] = {}
    for s, a in c.items():
        if len(s) != n + 1:
            raise ParameterError(f"chain simplex {s} does not have degree {n}")
        b = xi.get(s[: p + 1], 0)
        if a and b:
            back = s[p:]
            out[back] = out.get(back, 0) + a * b
    return {s: v for s, v in out.items() if v}


def coboundary(xi: Mapping[Simplex, int], p: int, X: SimplicialComplex) -> dict[Simplex, int]:
    out: dict[Simplex, int] = {}
    for s in X.of_dim(p + 1):
        v = sum(sign * xi.get(f, 0) for sign, f in boundary_faces(s))
        if v:
            out[s] = v
    return out


def chain_boundary(c: Mapping[Simplex, int]) -> dict[Simplex, int]:
    out: dict[Simplex, int] = {}
    for s, a in c.items():
        for sign, f in boundary_faces(s):
            out[f] = out.get(f, 0) + sign * a
    return {s: v for s, v in out.items() if v}


# ---------------------------------------------------------------- the duality map


def dual_cochain_complex(X, n: int | None = None) -> GradedChainComplex:
    """Δ^{n-*}(X) as a star complex: the cochain on a p-simplex sits in degree n - p."""
    space = X.complex if isinstance(X, SubdividedComplex) else X
    n = space.dim if n is None else n
    D = dual(simplicial_chain_complex(X))
    ranks = {(s, k + n): r for (s, k), r in D.ranks.items()}
    diff = {(t, s, k + n): m for (t, s, k), m in D.diff.items()}
    return GradedChainComplex(X, STAR, ranks, diff)


def cap_map(X, fc: FundamentalClass) -> GradedChainMap:
    """[X] ∩ - : Δ^{n-*}(X) -> Δ_*(X), in the full variant.

    The cochain dual to a p-simplex carries the sign (-1)^{p(p+1)/2}; with the
    transposed coboundary of the dual complex this is the sign that makes the
    front/back cap commute with the differentials.
    """
    n = fc.dimension
    source = dual_cochain_complex(X, n).with_variant(FULL)
    target = simplicial_chain_complex(X).with_variant(FULL)
    acc: dict = {}
    for rho, c in fc.coefficients.items():
        for p in range(n + 1):
            front, back = rho[: p + 1], rho[p:]
            key = (back, front, n - p)
            acc[key] = acc.get(key, 0) + c * (-1) ** (p * (p + 1) // 2)
    blocks = {k: intmat.as_int_matrix([[v]]) for k, v in acc.items() if v}
    return GradedChainMap(source, target, blocks)


def _proxy_points(base) -> tuple[SimplicialComplex, Mapping]:
    return _coords_of(base)


def controlled_contraction(E: GradedChainComplex) -> ContractionCertificate | HomologyWitness:
    """A contraction of an acyclic complex built column by column with small support.

    For each basis vector e of degree n the equation d x = e - Γ(d e) is solved
    over the summands nearest to e first (Euclidean distance of barycentres),
    widening the window until an integral solution exists.  Ordinary
    Smith-normal-form contraction would be valid too, but would smear the
    homotopy across the whole complex.
    """
    T, offsets = total_complex(E)
    K, coords = _proxy_points(E.base)
    where: dict[int, list] = {}
    for (s, n), off in offsets.items():
        for j in range(E.rank(s, n)):
            where.setdefault(n, []).append((off + j, s))
    for n in where:
        where[n].sort()
    points = {s: barycentre(coords, s) for s in {s for (s, _n) in offsets}}
    gamma: dict[int, np.ndarray] = {}
    for n in T.degrees():
        rows, cols = T.rank(n), T.rank(n + 1)
        if rows == 0:
            continue
        d_up = T.diff(n + 1)
        d_here = T.diff(n)
        prev = gamma.get(n - 1)
        g = intmat.zeros(cols, rows)
        above = where.get(n + 1, [])
        for idx, s in where[n]:
            y = intmat.zeros(rows, 1)
            y[idx, 0] = 1
            if prev is not None and d_here.size:
                y = y - prev @ d_here[:, idx: idx + 1]
            if intmat.is_zero(y):
                continue
            ranked = sorted(above, key=lambda item: (squared_distance(points[s], points[item[1]]), item[0]))
            x = None
            size = 4
            while x is None:
                size = min(size, len(ranked))
                picks = [i for i, _t in ranked[:size]]
                x_sub = intmat.solve(d_up[:, picks], y) if picks else None
                if x_sub is not None:
                    x = intmat.zeros(cols, 1)
                    for k, i in enumerate(picks):
                        x[i, 0] = x_sub[k, 0]
                elif size == len(ranked):
                    return HomologyWitness(homology_at(T, n))
                size *= 2
            g[:, idx: idx + 1] = x
        gamma[n] = g
    blocks = {}
    for (t, k), to in offsets.items():
        for (s, n), so in offsets.items():
            if k != n + 1 or n not in gamma:
                continue
            m = gamma[n][to: to + E.rank(t, k), so: so + E.rank(s, n)]
            if not intmat.is_zero(m):
                blocks[(t, s, n)] = m
    H = GradedHomotopy(E, E, blocks)
    return ContractionCertificate(H, H.boundary() == E.identity())


@dataclass
class PDCheck:
    is_pd_space: bool
    fundamental_class: FundamentalClass | OrientationFailure
    certificate: ContractionCertificate | None = None
    witness: dict | None = None
    cap: GradedChainMap | None = None

    def __bool__(self) -> bool:
        return self.is_pd_space


def _betti_table(D: FreeComplex) -> dict[int, dict]:
    return {n: {"betti": h.betti, "torsion": h.torsion} for n, h in homology(D).items()}


def pd_check(X) -> PDCheck:
    """Decide whether [X] ∩ - is a chain equivalence, via the total homology of its cone."""
    space = X.complex if isinstance(X, SubdividedComplex) else X
    fc = fundamental_class(space)
    if not fc:
        return PDCheck(False, fc, witness={"fundamental_class": fc.to_json()})
    cap = cap_map(X, fc)
    cone = mapping_cone(cap)
    res = controlled_contraction(cone)
    if isinstance(res, HomologyWitness):
        n = fc.dimension
        chains, _ = total_complex(cap.target)
        cochains, _ = total_complex(cap.source)
        witness = {
            "cone_homology": res.group.to_json(),
            "chain_homology": _betti_table(chains),
            "dual_cochain_homology": _betti_table(cochains),
            "dimension": n,
        }
        return PDCheck(False, fc, witness=witness, cap=cap)
    return PDCheck(res.verified, fc, certificate=res, cap=cap)


def controlled_pd_bound(X: SimplicialComplex, i: int) -> float:
    """Morphism bound, measured in X, of the duality package on Sd^i X.

    The package is ([Sd^i X] ∩ -, an inverse, and both homotopies) read off a
    small-support contraction of the cone.
    """
    if i < 0:
        raise ParameterError("the subdivision level must be non-negative")
    S = iterated_subdivision(X, i) if i > 0 else X
    res = pd_check(S)
    if not res:
        raise NotPoincareDualityError(f"not a Poincaré duality space: {res.witness}")
    cap = res.cap
    g, gc, gd = split_cone_homotopy(cap, res.certificate.homotopy)
    return package_bound([cap, g, gc, gd], S if i > 0 else None).value


# ---------------------------------------------------------------- homology manifolds


def reduced_homology(simplices: list[Simplex]) -> dict[int, HomologyGroup]:
    """Reduced homology of a (possibly empty) complex; the empty complex has Z in degree -1."""
    by_dim: dict[int, list[Simplex]] = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    top = max(by_dim) if by_dim else -1
    ranks = {-1: 1}
    index = {}
    for k in range(top + 1):
        cells = sorted(by_dim.get(k, []))
        ranks[k] = len(cells)
        index[k] = {s: j for j, s in enumerate(cells)}
    d = {}
    for k in range(top + 1):
        m = intmat.zeros(ranks[k - 1], ranks[k])
        for s, j in index[k].items():
            if k == 0:
                m[0, j] = 1
            else:
                for sign, f in boundary_faces(s):
                    m[index[k - 1][f], j] = sign
        d[k] = m
    return homology(FreeComplex(ranks, d))


@dataclass
class LinkDiagnostic:
    simplex: Simplex
    expected_degree: int
    homology: dict[int, HomologyGroup]
    ok: bool

    def to_json(self) -> dict:
        return {
            "simplex": list(self.simplex),
            "expected_sphere_dimension": self.expected_degree,
            "reduced_homology": {str(n): {"betti": h.betti, "torsion": h.torsion}
                                 for n, h in sorted(self.homology.items()) if not h.is_zero},
            "ok": self.ok,
        }


@dataclass
class HomologyManifoldReport:
    is_homology_manifold: bool
    diagnostics: list[LinkDiagnostic] = field(default_factory=list)
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.is_homology_manifold

    @property
    def failures(self) -> list[LinkDiagnostic]:
        return [dg for dg in self.diagnostics if not dg.ok]


def _is_sphere_homology(h: Mapping[int, HomologyGroup], m: int) -> bool:
    for n, g in h.items():
        want = 1 if n == m else 0
        if g.betti != want or g.torsion:
            return False
    return m in h


def is_homology_manifold(X: SimplicialComplex) -> HomologyManifoldReport:
    """Every link lk(σ) must have the reduced homology of S^{n - dim σ - 1}."""
    if not X.is_pure():
        return HomologyManifoldReport(False, reason=NON_PURE)
    n = X.dim
    diags = []
    for s in X.simplices:
        m = n - (len(s) - 1) - 1
        h = reduced_homology(X.link(s))
        diags.append(LinkDiagnostic(s, m, h, _is_sphere_homology(h, m)))
    return HomologyManifoldReport(all(dg.ok for dg in diags), diags)


# ---------------------------------------------------------------- report


@dataclass
class DualityReport:
    is_pd_space: bool
    pd: PDCheck
    is_homology_manifold: HomologyManifoldReport
    controlled_bound: float | None = None
    level: int | None = None

    def to_json(self) -> dict:
        out = {
            "is_pd_space": self.is_pd_space,
            "fundamental_class": self.pd.fundamental_class.to_json(),
            "is_homology_manifold": self.is_homology_manifold.is_homology_manifold,
            "link_failures": [dg.to_json() for dg in self.is_homology_manifold.failures],
        }
        if self.pd.certificate is not None:
            out["cone_certificate"] = self.pd.certificate.to_json()
        if self.pd.witness is not None:
            out["witness"] = self.pd.witness
        if self.controlled_bound is not None:
            out["controlled_bound"] = self.controlled_bound
            out["level"] = self.level
        return out


def duality_report(X: SimplicialComplex, level: int | None = None) -> DualityReport:
    pd = pd_check(X)
    hm = is_homology_manifold(X)
    bound = controlled_pd_bound(X, level) if (level is not None and pd) else None
    return DualityReport(pd.is_pd_space, pd, hm, bound, level)
