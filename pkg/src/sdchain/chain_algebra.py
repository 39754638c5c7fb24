"""Chain complexes of free abelian groups graded over simplicial complexes.

Blocks are stored sparsely: ``blocks[(tau, sigma, n)]`` is the matrix from
the summand over ``sigma`` in source degree ``n`` to the summand over ``tau``
in degree ``n + degree``.  Missing keys are zero blocks.  An operator may
join complexes over different bases (for instance C over X and Sd C over
Sd X); the variant conditions only make sense when both bases agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping

import numpy as np

from . import intmat
from .errors import (
    BaseMismatchError,
    ContractionFailedError,
    InvalidLocalContractionError,
    MalformedSimplexError,
    ParameterError,
    UnsupportedVariantError,
)
from .simplicial_core import (
    Simplex,
    SimplicialComplex,
    SubdividedComplex,
    boundary_faces,
    is_face,
    simplex_key,
)

COSTAR, STAR, FULL = "costar", "star", "full"
VARIANTS = (COSTAR, STAR, FULL)
DUAL_VARIANT = {COSTAR: STAR, STAR: COSTAR, FULL: FULL}

Key = tuple  # (target simplex, source simplex, source degree)


def space_of(base) -> SimplicialComplex:
    return base.complex if isinstance(base, SubdividedComplex) else base


def allowed(variant: str, tau: Simplex, sigma: Simplex) -> bool:
    """May a block run from the summand over ``sigma`` to the one over ``tau``?"""
    if variant == COSTAR:
        return is_face(tau, sigma)
    if variant == STAR:
        return is_face(sigma, tau)
    return True


# ---------------------------------------------------------------- complexes


class GradedChainComplex:
    """A finite chain complex graded over the simplices of ``base``."""

    def __init__(self, base, variant: str, ranks: Mapping, diff: Mapping):
        if variant not in VARIANTS:
            raise ParameterError(f"unknown variant {variant!r}")
        self.base = base
        self.variant = variant
        self.ranks: dict[tuple[Simplex, int], int] = {k: int(v) for k, v in ranks.items() if v}
        space = space_of(base)
        for (s, _n) in self.ranks:
            space.check(s)
        self.diff: dict[Key, np.ndarray] = {}
        for (t, s, n), m in diff.items():
            shape = (self.rank(t, n - 1), self.rank(s, n))
            if m.shape != shape:
                raise MalformedSimplexError(f"block {(t, s, n)} has shape {m.shape}, expected {shape}")
            if shape[0] and shape[1] and not intmat.is_zero(m):
                self.diff[(t, s, n)] = m

    @property
    def space(self) -> SimplicialComplex:
        return space_of(self.base)

    def rank(self, s: Simplex, n: int) -> int:
        return self.ranks.get((s, n), 0)

    @cached_property
    def degree_range(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        degs = [n for (_s, n) in self.ranks]
        return min(degs), max(degs)

    @cached_property
    def support(self) -> list[Simplex]:
        return sorted({s for (s, _n) in self.ranks}, key=simplex_key)

    @cached_property
    def _degree_index(self) -> dict[Simplex, list[int]]:
        idx: dict[Simplex, list[int]] = {}
        for (t, n) in sorted(self.ranks, key=lambda k: k[1]):
            idx.setdefault(t, []).append(n)
        return idx

    def degrees(self, s: Simplex) -> list[int]:
        return list(self._degree_index.get(s, ()))

    @cached_property
    def d(self) -> "BlockOp":
        return BlockOp(self, self, -1, self.diff)

    def local(self, s: Simplex) -> "FreeComplex":
        ranks = {n: self.rank(s, n) for n in self.degrees(s)}
        return FreeComplex(ranks, self._diagonal_index.get(s, {}))

    @cached_property
    def _diagonal_index(self) -> dict[Simplex, dict[int, np.ndarray]]:
        idx: dict[Simplex, dict[int, np.ndarray]] = {}
        for (t, u, n), m in self.diff.items():
            if t == u:
                idx.setdefault(t, {})[n] = m
        return idx

    def is_zero(self) -> bool:
        return not self.ranks

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedChainComplex):
            return NotImplemented
        return (
            self.space == other.space
            and self.variant == other.variant
            and self.ranks == other.ranks
            and _blocks_equal(self.diff, other.diff)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"GradedChainComplex({self.variant}, summands={len(self.ranks)}, blocks={len(self.diff)})"

    def with_variant(self, variant: str) -> "GradedChainComplex":
        return GradedChainComplex(self.base, variant, self.ranks, self.diff)

    def identity(self) -> "GradedChainMap":
        return GradedChainMap(self, self, {(s, s, n): intmat.eye(r) for (s, n), r in self.ranks.items()})

    def zero_map(self, target: "GradedChainComplex") -> "GradedChainMap":
        return GradedChainMap(self, target, {})

    # serialization
    def to_json(self) -> dict:
        return {
            "base": self.space.to_json(),
            "variant": self.variant,
            "ranks": [[list(s), n, r] for (s, n), r in sorted(self.ranks.items(), key=_rank_key)],
            "diff": _blocks_to_json(self.diff),
        }

    @classmethod
    def from_json(cls, data: Mapping, base=None) -> "GradedChainComplex":
        try:
            if base is None:
                base = SimplicialComplex.from_json(data["base"])
            ranks = {(tuple(s), int(n)): int(r) for s, n, r in data["ranks"]}
            diff = _blocks_from_json(data.get("diff", []))
            return cls(base, data.get("variant", COSTAR), ranks, diff)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedSimplexError):
                raise
            raise MalformedSimplexError(f"malformed chain complex: {exc}") from exc


def _rank_key(item):
    (s, n), _r = item
    return (simplex_key(s), n)


def _block_key(k):
    t, s, n = k
    return (simplex_key(t), simplex_key(s), n)


def _blocks_to_json(blocks: Mapping) -> list:
    return [[list(t), list(s), n, intmat.to_lists(m)] for (t, s, n), m in sorted(blocks.items(), key=lambda kv: _block_key(kv[0]))]


def _blocks_from_json(data) -> dict:
    out = {}
    for t, s, n, m in data:
        rows = len(m)
        cols = len(m[0]) if rows else 0
        out[(tuple(t), tuple(s), int(n))] = intmat.as_int_matrix(m, rows, cols)
    return out


def _blocks_equal(a: Mapping, b: Mapping) -> bool:
    keys = set(a) | set(b)
    for k in keys:
        x, y = a.get(k), b.get(k)
        if x is None:
            if not intmat.is_zero(y):
                return False
        elif y is None:
            if not intmat.is_zero(x):
                return False
        elif not intmat.equal(x, y):
            return False
    return True


# ---------------------------------------------------------------- operators


class BlockOp:
    """Degree-``degree`` homomorphism between two graded complexes."""

    def __init__(self, source: GradedChainComplex, target: GradedChainComplex, degree: int, blocks: Mapping):
        self.source = source
        self.target = target
        self.degree = degree
        self.blocks: dict[Key, np.ndarray] = {}
        for (t, s, n), m in blocks.items():
            shape = (target.rank(t, n + degree), source.rank(s, n))
            if m.shape != shape:
                raise MalformedSimplexError(f"block {(t, s, n)} has shape {m.shape}, expected {shape}")
            if shape[0] and shape[1] and not intmat.is_zero(m):
                self.blocks[(t, s, n)] = m

    def _new(self, source, target, degree, blocks):
        if degree == 0:
            return GradedChainMap(source, target, blocks)
        if degree == 1:
            return GradedHomotopy(source, target, blocks)
        return BlockOp(source, target, degree, blocks)

    @cached_property
    def _by_source(self) -> dict[Simplex, list]:
        out: dict[Simplex, list] = {}
        for (t, s, n), m in self.blocks.items():
            out.setdefault(s, []).append((t, n, m))
        return out

    def __matmul__(self, other: "BlockOp") -> "BlockOp":
        """Composition ``self ∘ other``."""
        acc: dict[Key, np.ndarray] = {}
        mine = self._by_source
        for (mid, s, n), b in other.blocks.items():
            for (t, n2, a) in mine.get(mid, ()):
                if n2 != n + other.degree:
                    continue
                k = (t, s, n)
                p = a @ b
                acc[k] = acc[k] + p if k in acc else p
        return self._new(other.source, self.target, self.degree + other.degree, acc)

    def _combine(self, other: "BlockOp", sign: int) -> "BlockOp":
        if self.degree != other.degree:
            raise ParameterError("cannot add operators of different degree")
        acc = dict(self.blocks)
        for k, m in other.blocks.items():
            acc[k] = acc[k] + sign * m if k in acc else sign * m
        return self._new(self.source, self.target, self.degree, acc)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self._new(self.source, self.target, self.degree, {k: -m for k, m in self.blocks.items()})

    def scaled(self, c: int) -> "BlockOp":
        return self._new(self.source, self.target, self.degree, {k: c * m for k, m in self.blocks.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockOp):
            return NotImplemented
        return self.degree == other.degree and _blocks_equal(self.blocks, other.blocks)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.blocks

    def respects(self, variant: str) -> bool:
        return all(allowed(variant, t, s) for (t, s, _n) in self.blocks)

    def violations(self, variant: str) -> list[Key]:
        return sorted((k for k in self.blocks if not allowed(variant, k[0], k[1])), key=_block_key)

    def to_json(self) -> dict:
        return {"degree": self.degree, "blocks": _blocks_to_json(self.blocks)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(degree={self.degree}, blocks={len(self.blocks)})"


class GradedChainMap(BlockOp):
    def __init__(self, source, target, blocks):
        super().__init__(source, target, 0, blocks)

    def is_chain_map(self) -> bool:
        return (self.target.d @ self) == (self @ self.source.d)


class GradedHomotopy(BlockOp):
    """Degree +1 operator; ``on`` is the source when source and target agree."""

    def __init__(self, source, target, blocks):
        super().__init__(source, target, 1, blocks)

    @property
    def on(self) -> GradedChainComplex:
        return self.source

    def boundary(self) -> GradedChainMap:
        """``d H + H d``."""
        return (self.target.d @ self) + (self @ self.source.d)


def zero_complex(base, variant=COSTAR) -> GradedChainComplex:
    return GradedChainComplex(base, variant, {}, {})


def chain_map_from_json(data: Mapping, source, target) -> GradedChainMap:
    return GradedChainMap(source, target, _blocks_from_json(data["blocks"]))


def homotopy_from_json(data: Mapping, source, target=None) -> GradedHomotopy:
    return GradedHomotopy(source, target if target is not None else source, _blocks_from_json(data["blocks"]))


# ---------------------------------------------------------------- basic checks


def verify(C: GradedChainComplex) -> bool:
    """Variant triangularity and d^2 = 0."""
    if not C.d.respects(C.variant):
        return False
    return (C.d @ C.d).is_zero()


def same_space(a: GradedChainComplex, b: GradedChainComplex) -> bool:
    return a.space == b.space


def mapping_cone(f: GradedChainMap) -> GradedChainComplex:
    C, D = f.source, f.target
    if not same_space(C, D):
        raise BaseMismatchError("mapping cone needs source and target over the same base")
    variant = C.variant if (C.variant == D.variant and f.respects(C.variant)) else FULL
    ranks: dict[tuple[Simplex, int], int] = {}
    for (s, n), r in C.ranks.items():
        ranks[(s, n)] = ranks.get((s, n), 0) + r
    for (s, n), r in D.ranks.items():
        ranks[(s, n - 1)] = ranks.get((s, n - 1), 0) + r
    diff: dict[Key, np.ndarray] = {}

    def block(t, s, n):
        if (t, s, n) not in diff:
            diff[(t, s, n)] = intmat.zeros(ranks.get((t, n - 1), 0), ranks.get((s, n), 0))
        return diff[(t, s, n)]

    for (t, s, n), m in C.diff.items():
        block(t, s, n)[: m.shape[0], : m.shape[1]] = m
    for (t, s, n), m in f.blocks.items():
        ct, cs = C.rank(t, n - 1), C.rank(s, n)
        block(t, s, n)[ct:, :cs] = m
    for (t, s, n1), m in D.diff.items():
        n = n1 - 1
        ct, cs = C.rank(t, n - 1), C.rank(s, n)
        block(t, s, n)[ct:, cs:] = -m
    return GradedChainComplex(C.base, variant, ranks, diff)


def split_cone_homotopy(f: GradedChainMap, H: GradedHomotopy):
    """Recover (g, Gamma_C, Gamma_D) from a contraction H of cone(f).

    With cone blocks C_n + D_{n+1}: g = H_12, Gamma_C = H_11, Gamma_D = -H_22,
    so that 1 - g f = d Gamma_C + Gamma_C d and 1 - f g = d Gamma_D + Gamma_D d.
    """
    C, D = f.source, f.target
    g, gc, gd = {}, {}, {}
    for (t, s, n), m in H.blocks.items():
        ct_hi = C.rank(t, n + 1)
        cs = C.rank(s, n)
        h11 = m[:ct_hi, :cs]
        h12 = m[:ct_hi, cs:]
        h22 = m[ct_hi:, cs:]
        if h11.size:
            gc[(t, s, n)] = h11
        if h12.size:
            g[(t, s, n + 1)] = h12
        if h22.size:
            gd[(t, s, n + 1)] = -h22
    return GradedChainMap(D, C, g), GradedHomotopy(C, C, gc), GradedHomotopy(D, D, gd)


# ---------------------------------------------------------------- simplicial examples


def simplicial_chain_complex(X) -> GradedChainComplex:
    space = space_of(X)
    ranks = {(s, len(s) - 1): 1 for s in space.simplices}
    diff = {}
    for s in space.simplices:
        for sign, f in boundary_faces(s):
            diff[(f, s, len(s) - 1)] = intmat.as_int_matrix([[sign]])
    return GradedChainComplex(X, COSTAR, ranks, diff)


def simplicial_cochain_complex(X) -> GradedChainComplex:
    return dual(simplicial_chain_complex(X))


# ---------------------------------------------------------------- duality functor


def dual(C: GradedChainComplex) -> GradedChainComplex:
    """``C^(sigma)_n = Hom(C(sigma)_{-n}, Z)`` with transposed differential."""
    ranks = {(s, -n): r for (s, n), r in C.ranks.items()}
    diff = {(s, t, 1 - n): m.T.copy() for (t, s, n), m in C.diff.items()}
    return GradedChainComplex(C.base, DUAL_VARIANT[C.variant], ranks, diff)


def dual_op(op: BlockOp, source_dual: GradedChainComplex | None = None, target_dual: GradedChainComplex | None = None) -> BlockOp:
    """Transpose of an operator between dual complexes (direction reverses)."""
    src = source_dual if source_dual is not None else dual(op.target)
    tgt = target_dual if target_dual is not None else dual(op.source)
    k = op.degree
    blocks = {(s, t, -n - k): m.T.copy() for (t, s, n), m in op.blocks.items()}
    return op._new(src, tgt, k, blocks)


# ---------------------------------------------------------------- free complexes


@dataclass
class FreeComplex:
    """A plain finite complex: ``d[n]`` maps degree n to degree n - 1."""

    ranks: dict[int, int]
    d: dict[int, np.ndarray] = field(default_factory=dict)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def diff(self, n: int) -> np.ndarray:
        m = self.d.get(n)
        if m is None:
            return intmat.zeros(self.rank(n - 1), self.rank(n))
        return m

    def degrees(self) -> list[int]:
        live = [n for n, r in self.ranks.items() if r]
        return list(range(min(live), max(live) + 1)) if live else []

    @classmethod
    def from_lists(cls, ranks: Mapping[int, int], d: Mapping[int, list]) -> "FreeComplex":
        out = {}
        for n, m in d.items():
            out[int(n)] = intmat.as_int_matrix(m, ranks.get(n - 1, 0), ranks.get(n, 0))
        return cls({int(k): int(v) for k, v in ranks.items()}, out)

    def is_complex(self) -> bool:
        return all(intmat.is_zero(self.diff(n - 1) @ self.diff(n)) for n in self.degrees())


@dataclass
class HomologyGroup:
    degree: int
    betti: int
    torsion: list[int]
    representatives: list[list[int]]

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"degree": self.degree, "betti": self.betti, "torsion": self.torsion, "representatives": self.representatives}


def homology_at(D: FreeComplex, n: int) -> HomologyGroup:
    dn, dn1 = D.diff(n), D.diff(n + 1)
    snf = intmat.smith(dn)
    k = snf.rank
    kernel = snf.V[:, k:]
    coords = (snf.V_inv @ dn1)[k:, :]
    inner = intmat.smith(coords)
    betti = kernel.shape[1] - inner.rank
    torsion = [d for d in inner.diag if d > 1]
    picks = [i for i, dval in enumerate(inner.diag) if dval > 1]
    picks += list(range(inner.rank, kernel.shape[1]))
    reps = [[int(v) for v in (kernel @ inner.U_inv[:, i: i + 1]).flat] for i in picks]
    return HomologyGroup(n, betti, torsion, reps)


def homology(D: FreeComplex) -> dict[int, HomologyGroup]:
    return {n: homology_at(D, n) for n in D.degrees()}


@dataclass
class HomologyWitness:
    """Evidence that a complex is not contractible."""

    group: HomologyGroup
    simplex: Simplex | None = None

    def to_json(self) -> dict:
        out = self.group.to_json()
        if self.simplex is not None:
            out["simplex"] = list(self.simplex)
        return out


@dataclass
class ContractionCertificate:
    homotopy: object
    verified: bool

    def __bool__(self) -> bool:
        return self.verified

    def to_json(self) -> dict:
        h = self.homotopy
        if isinstance(h, BlockOp):
            body = h.to_json()
        else:
            body = {"degree": 1, "blocks": [[n, intmat.to_lists(m)] for n, m in sorted(h.items())]}
        return {"verified": self.verified, "homotopy": body}


def local_contract(D: FreeComplex) -> ContractionCertificate | HomologyWitness:
    """Contract ``D`` degree by degree or return a nonzero homology group."""
    degs = D.degrees()
    gamma: dict[int, np.ndarray] = {}
    for n in degs:
        prev = gamma.get(n - 1)
        target = intmat.eye(D.rank(n))
        if prev is not None:
            target = target - prev @ D.diff(n)
        x = intmat.solve(D.diff(n + 1), target)
        if x is None:
            return HomologyWitness(homology_at(D, n))
        gamma[n] = x
    gamma = {n: m for n, m in gamma.items() if m.size and not intmat.is_zero(m)}
    return ContractionCertificate(gamma, check_local(D, gamma))


def check_local(D: FreeComplex, gamma: Mapping[int, np.ndarray]) -> bool:
    for n in D.degrees():
        acc = intmat.eye(D.rank(n))
        g_n = gamma.get(n)
        if g_n is not None:
            acc = acc - D.diff(n + 1) @ g_n
        g_p = gamma.get(n - 1)
        if g_p is not None:
            acc = acc - g_p @ D.diff(n)
        if not intmat.is_zero(acc):
            return False
    return True


def total_complex(C: GradedChainComplex) -> tuple[FreeComplex, dict]:
    """Forget the grading over simplices; returns the complex and basis offsets."""
    offsets: dict[tuple[Simplex, int], int] = {}
    ranks: dict[int, int] = {}
    for (s, n), r in sorted(C.ranks.items(), key=_rank_key):
        offsets[(s, n)] = ranks.get(n, 0)
        ranks[n] = ranks.get(n, 0) + r
    d: dict[int, np.ndarray] = {}
    for (t, s, n), m in C.diff.items():
        if n not in d:
            d[n] = intmat.zeros(ranks.get(n - 1, 0), ranks.get(n, 0))
        i, j = offsets[(t, n - 1)], offsets[(s, n)]
        d[n][i: i + m.shape[0], j: j + m.shape[1]] += m
    return FreeComplex(ranks, d), offsets


# ---------------------------------------------------------------- contraction


def globalize_contraction(C: GradedChainComplex, locals_: Mapping[Simplex, Mapping[int, np.ndarray]]) -> ContractionCertificate:
    """Assemble local contractions into a triangular global one.

    P_{tau,sigma} = - sum_rho P_tau d_{tau,rho} P_{rho,sigma}, which unrolls to
    the alternating sum over flags tau = s_0 < ... < s_i = sigma.
    """
    if C.variant == FULL:
        raise UnsupportedVariantError("the local criterion only applies to costar and star complexes")
    for s in C.support:
        if not check_local(C.local(s), locals_.get(s, {})):
            raise InvalidLocalContractionError(s)
    # off-diagonal differential grouped by target simplex
    out_edges: dict[Simplex, list] = {}
    for (t, s, n), m in C.diff.items():
        if t != s:
            out_edges.setdefault(t, []).append((s, n, m))
    le = (lambda a, b: is_face(a, b)) if C.variant == COSTAR else (lambda a, b: is_face(b, a))
    memo: dict[tuple[Simplex, Simplex], dict[int, np.ndarray]] = {}

    def P(tau: Simplex, sigma: Simplex) -> dict[int, np.ndarray]:
        """Degree-n component C(sigma)_n -> C(tau)_{n+1}, keyed by n."""
        key = (tau, sigma)
        if key in memo:
            return memo[key]
        if tau == sigma:
            res = dict(locals_.get(sigma, {}))
        else:
            res = {}
            p_tau = locals_.get(tau, {})
            for rho, n1, dm in out_edges.get(tau, ()):
                # dm: C(rho)_{n1} -> C(tau)_{n1-1}
                if not le(rho, sigma):
                    continue
                inner = P(rho, sigma)
                for n, pm in inner.items():
                    if n + 1 != n1:
                        continue
                    pt = p_tau.get(n)
                    if pt is None:
                        continue
                    term = pt @ dm @ pm
                    res[n] = res[n] - term if n in res else -term
        res = {n: m for n, m in res.items() if not intmat.is_zero(m)}
        memo[key] = res
        return res

    space = C.space
    related = space.faces if C.variant == COSTAR else space.cofaces
    present = set(C.support)
    blocks = {}
    for sigma in C.support:
        for tau in related(sigma):
            if tau in present:
                for n, m in P(tau, sigma).items():
                    blocks[(tau, sigma, n)] = m
    H = GradedHomotopy(C, C, blocks)
    return ContractionCertificate(H, is_contraction(H))


def is_contraction(H: GradedHomotopy) -> bool:
    return H.boundary() == H.source.identity()


@dataclass
class ContractibilityWitness:
    simplex: Simplex
    witness: HomologyWitness

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"simplex": list(self.simplex), "homology": self.witness.group.to_json()}


def is_contractible(C: GradedChainComplex) -> ContractionCertificate | ContractibilityWitness:
    if C.variant == FULL:
        raise UnsupportedVariantError("use the total homology test for full-variant complexes")
    locs = {}
    for s in C.support:
        res = local_contract(C.local(s))
        if isinstance(res, HomologyWitness):
            res.simplex = s
            return ContractibilityWitness(s, res)
        locs[s] = res.homotopy
    cert = globalize_contraction(C, locs)
    if not cert.verified:
        raise ContractionFailedError("globalized homotopy failed its exact check")
    return cert


def total_homology_vanishes(C: GradedChainComplex) -> tuple[bool, HomologyGroup | None]:
    """Full-variant decision: is the underlying total complex acyclic?"""
    T, _ = total_complex(C)
    for n in T.degrees():
        h = homology_at(T, n)
        if not h.is_zero:
            return False, h
    return True, None


@dataclass
class EquivalenceCertificate:
    """f: C -> D with inverse g and homotopies 1 - g f = dΓ_C + Γ_C d, 1 - f g = dΓ_D + Γ_D d."""

    f: GradedChainMap
    g: GradedChainMap
    gamma_C: GradedHomotopy
    gamma_D: GradedHomotopy

    def check(self) -> bool:
        C, D = self.f.source, self.f.target
        ok_c = (C.identity() - self.g @ self.f) == self.gamma_C.boundary()
        ok_d = (D.identity() - self.f @ self.g) == self.gamma_D.boundary()
        return ok_c and ok_d and self.f.is_chain_map() and self.g.is_chain_map()

    def then(self, other: "EquivalenceCertificate") -> "EquivalenceCertificate":
        """Certificate for ``other.f ∘ self.f``."""
        f = other.f @ self.f
        g = self.g @ other.g
        gc = self.gamma_C + self.g @ other.gamma_C @ self.f
        ge = other.gamma_D + other.f @ self.gamma_D @ other.g
        return EquivalenceCertificate(f, g, gc, ge)

    def ops(self) -> list[BlockOp]:
        return [self.f, self.g, self.gamma_C, self.gamma_D]


@dataclass
class EquivalenceResult:
    is_equivalence: bool
    contraction: ContractionCertificate | None = None
    witness: ContractibilityWitness | None = None
    certificate: EquivalenceCertificate | None = None

    def __bool__(self) -> bool:
        return self.is_equivalence


def is_chain_equivalence(f: GradedChainMap) -> EquivalenceResult:
    cone = mapping_cone(f)
    res = is_contractible(cone)
    if isinstance(res, ContractibilityWitness):
        return EquivalenceResult(False, witness=res)
    g, gc, gd = split_cone_homotopy(f, res.homotopy)
    return EquivalenceResult(True, contraction=res, certificate=EquivalenceCertificate(f, g, gc, gd))


# ---------------------------------------------------------------- assembly


class Regrouping:
    """Presents a complex over a fine base as one over a coarse base.

    ``key`` sends each fine simplex to the coarse simplex whose summand it
    joins; within a coarse summand the fine pieces appear in canonical order.
    """

    def __init__(self, C: GradedChainComplex, coarse_base, key: Callable[[Simplex], Simplex], variant: str):
        self.fine = C
        self.coarse_base = coarse_base
        self.key = key
        self.variant = variant
        self.offsets: dict[tuple[Simplex, int], int] = {}
        ranks: dict[tuple[Simplex, int], int] = {}
        for (s, n), r in sorted(C.ranks.items(), key=_rank_key):
            c = key(s)
            self.offsets[(s, n)] = ranks.get((c, n), 0)
            ranks[(c, n)] = ranks.get((c, n), 0) + r
        self.ranks = ranks
        self.complex = GradedChainComplex(coarse_base, variant, ranks, self._regroup(C.diff, self, self, -1))

    @staticmethod
    def _regroup(blocks, src: "Regrouping | None", tgt: "Regrouping | None", degree: int) -> dict:
        out: dict[Key, np.ndarray] = {}
        for (t, s, n), m in blocks.items():
            if tgt is not None:
                ct, i = tgt.key(t), tgt.offsets[(t, n + degree)]
                rows = tgt.ranks[(ct, n + degree)]
            else:
                ct, i, rows = t, 0, m.shape[0]
            if src is not None:
                cs, j = src.key(s), src.offsets[(s, n)]
                cols = src.ranks[(cs, n)]
            else:
                cs, j, cols = s, 0, m.shape[1]
            k = (ct, cs, n)
            if k not in out:
                out[k] = intmat.zeros(rows, cols)
            out[k][i: i + m.shape[0], j: j + m.shape[1]] += m
        return out

    def members(self, c: Simplex, n: int) -> list[Simplex]:
        return [s for (s, k) in sorted(self.offsets, key=lambda x: self.offsets[x]) if k == n and self.key(s) == c]


def regroup_op(op: BlockOp, source: Regrouping | None = None, target: Regrouping | None = None) -> BlockOp:
    blocks = Regrouping._regroup(op.blocks, source, target, op.degree)
    src = source.complex if source is not None else op.source
    tgt = target.complex if target is not None else op.target
    return op._new(src, tgt, op.degree, blocks)


def ungroup_op(op: BlockOp, fine_source: Regrouping | None, fine_target: Regrouping | None) -> BlockOp:
    """Inverse of :func:`regroup_op`: split coarse blocks into fine ones."""
    k = op.degree
    src_parts = _parts(fine_source)
    tgt_parts = _parts(fine_target)
    out = {}
    for (t, s, n), m in op.blocks.items():
        rows = tgt_parts.get((t, n + k), [(t, 0, m.shape[0])]) if fine_target is not None else [(t, 0, m.shape[0])]
        cols = src_parts.get((s, n), [(s, 0, m.shape[1])]) if fine_source is not None else [(s, 0, m.shape[1])]
        for ft, i, r in rows:
            for fs, j, c in cols:
                sub = m[i: i + r, j: j + c]
                if sub.size and not intmat.is_zero(sub):
                    out[(ft, fs, n)] = sub
    src = fine_source.fine if fine_source is not None else op.source
    tgt = fine_target.fine if fine_target is not None else op.target
    return op._new(src, tgt, k, out)


def _parts(g: Regrouping | None) -> dict:
    out: dict = {}
    if g is None:
        return out
    for (s, n), off in g.offsets.items():
        out.setdefault((g.key(s), n), []).append((s, off, g.fine.rank(s, n)))
    return out


def _level_one(C: GradedChainComplex) -> SubdividedComplex:
    S = C.base
    if not isinstance(S, SubdividedComplex):
        raise BaseMismatchError("assembly needs a complex graded over a barycentric subdivision")
    return S


def covariant_regrouping(C: GradedChainComplex) -> Regrouping:
    S = _level_one(C)
    base = S.parent if S.parent is not None else S.base
    return Regrouping(C, base, lambda s: S.barycentre[s[-1]], C.variant)


def contravariant_regrouping(C: GradedChainComplex) -> Regrouping:
    S = _level_one(C)
    base = S.parent if S.parent is not None else S.base
    return Regrouping(C, base, lambda s: S.barycentre[s[0]], DUAL_VARIANT[C.variant])


def assemble_covariant(C: GradedChainComplex) -> GradedChainComplex:
    """R(C)(sigma) = sum of C over the open subdivided simplices inside sigma."""
    return covariant_regrouping(C).complex


def assemble_contravariant(C: GradedChainComplex) -> GradedChainComplex:
    """T(C)(sigma) = sum of C over the open dual cell of sigma."""
    return contravariant_regrouping(C).complex


def assemble_map(f: BlockOp, covariant: bool = True) -> BlockOp:
    rg = covariant_regrouping if covariant else contravariant_regrouping
    return regroup_op(f, rg(f.source), rg(f.target))


# ---------------------------------------------------------------- helpers


def direct_sum(parts: Iterable[GradedChainComplex]) -> GradedChainComplex:
    parts = list(parts)
    base, variant = parts[0].base, parts[0].variant
    ranks: dict = {}
    offs = []
    for P in parts:
        o = {}
        for k, r in P.ranks.items():
            o[k] = ranks.get(k, 0)
            ranks[k] = ranks.get(k, 0) + r
        offs.append(o)
    diff: dict = {}
    for P, o in zip(parts, offs):
        for (t, s, n), m in P.diff.items():
            if (t, s, n) not in diff:
                diff[(t, s, n)] = intmat.zeros(ranks[(t, n - 1)], ranks[(s, n)])
            i, j = o[(t, n - 1)], o[(s, n)]
            diff[(t, s, n)][i: i + m.shape[0], j: j + m.shape[1]] += m
        if P.variant != variant:
            variant = FULL
    return GradedChainComplex(base, variant, ranks, diff)
