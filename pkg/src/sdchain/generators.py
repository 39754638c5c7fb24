"""Named example complexes and seeded random graded complexes and maps."""
from __future__ import annotations

import random

import numpy as np

from . import intmat
from .chain_algebra import (
    COSTAR,
    FULL,
    STAR,
    EquivalenceCertificate,
    GradedChainComplex,
    GradedChainMap,
    GradedHomotopy,
    direct_sum,
    dual,
    simplicial_chain_complex,
)
from .control_metrics import BarycentreMetric, _coords_of, _op_bound
from .errors import ParameterError
from .map_analysis import SimplicialMap
from .simplicial_core import (
    SimplicialComplex,
    SubdividedComplex,
    build_complex,
    faces_of,
    is_face,
    squared_distance,
    standard_simplex,
)

NAMED = {
    "delta0": [[0]],
    "delta1": [[0, 1]],
    "delta2": [[0, 1, 2]],
    "delta3": [[0, 1, 2, 3]],
    "boundary-delta3": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
    "t-graph": [[0, 1], [1, 2], [1, 3]],
    "wedge-circles": [[0, 1], [1, 2], [0, 2], [0, 3], [3, 4], [0, 4]],
    "wedge-spheres": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 4, 5], [0, 4, 6], [0, 5, 6], [4, 5, 6]],
}


def named_complex(name: str) -> SimplicialComplex:
    return build_complex(NAMED[name])


def random_bases() -> list[SimplicialComplex]:
    return [standard_simplex(1), standard_simplex(2), named_complex("boundary-delta3"), named_complex("t-graph")]


def _rand_matrix(rng: random.Random, rows: int, cols: int, lo: int = -2, hi: int = 2) -> np.ndarray:
    m = intmat.zeros(rows, cols)
    for i in range(rows):
        for j in range(cols):
            m[i, j] = rng.randint(lo, hi)
    return m


def _local_pieces(rng: random.Random, lo: int, span: int, contractible: bool, max_rank: int):
    """Random local complex as (ranks by degree, d by degree)."""
    ranks: dict[int, int] = {}
    pairs: list[tuple[int, int, int, int]] = []  # (source degree, row, col, entry)
    pieces = rng.randint(0, 2)
    for _ in range(pieces):
        kind = "pair" if contractible else rng.choice(["pair", "free", "free", "torsion"])
        if kind == "free":
            n = rng.randint(lo, lo + span - 1)
            if ranks.get(n, 0) + 1 > max_rank:
                continue
            ranks[n] = ranks.get(n, 0) + 1
        else:
            if span < 2:
                continue
            n = rng.randint(lo + 1, lo + span - 1)
            if ranks.get(n, 0) + 1 > max_rank or ranks.get(n - 1, 0) + 1 > max_rank:
                continue
            row, col = ranks.get(n - 1, 0), ranks.get(n, 0)
            ranks[n - 1] = row + 1
            ranks[n] = col + 1
            pairs.append((n, row, col, 1 if kind == "pair" else 2))
    d = {}
    for n, row, col, val in pairs:
        if n not in d:
            d[n] = intmat.zeros(ranks[n - 1], ranks[n])
        d[n][row, col] = val
    # pad shapes in case ranks grew after a block was created
    for n in list(d):
        m = d[n]
        full = intmat.zeros(ranks.get(n - 1, 0), ranks.get(n, 0))
        full[: m.shape[0], : m.shape[1]] = m
        d[n] = full
    return ranks, d


def _unimodular(rng: random.Random, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Random product of elementary matrices and its inverse."""
    a, ai = intmat.eye(n), intmat.eye(n)
    for _ in range(2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        e = intmat.eye(n)
        e[i, j] = c
        ei = intmat.eye(n)
        ei[i, j] = -c
        a, ai = e @ a, ai @ ei
    return a, ai


def random_complex(X: SimplicialComplex, rng: random.Random, variant: str = COSTAR, *, contractible: bool = False,
                   max_rank: int = 3, span: int = 4, with_simplicial: bool | None = None) -> GradedChainComplex:
    """A random complex over X: local pieces twisted by a triangular automorphism.

    Ranks stay at most ``max_rank`` and degrees inside a window of ``span``.
    Unless ``contractible``, a shifted copy of the simplicial chains is
    sometimes added so that off-diagonal blocks are not all removable.
    """
    lo = rng.randint(-1, 1)
    ranks: dict = {}
    diff: dict = {}
    for s in X.simplices:
        loc_r, loc_d = _local_pieces(rng, lo, span, contractible, max_rank)
        for n, r in loc_r.items():
            ranks[(s, n)] = r
        for n, m in loc_d.items():
            diff[(s, s, n)] = m
    C = GradedChainComplex(X, COSTAR, ranks, diff)
    if with_simplicial is None:
        with_simplicial = not contractible and rng.random() < 0.4
    if with_simplicial and X.dim + 1 <= span:
        shift = lo
        S = simplicial_chain_complex(X)
        S = GradedChainComplex(X, COSTAR, {(s, n + shift): r for (s, n), r in S.ranks.items()},
                               {(t, s, n + shift): m for (t, s, n), m in S.diff.items()})
        if all(C.rank(s, n) + r <= max_rank for (s, n), r in S.ranks.items()):
            C = direct_sum([C, S])
    C = twist(C, rng)
    return C if variant == COSTAR else dual(C)


def twist(C: GradedChainComplex, rng: random.Random, density: float = 0.5) -> GradedChainComplex:
    """Conjugate d by a random triangular automorphism phi = D (1 + N)."""
    X = C.space
    N = {}
    for (sigma, n), r in C.ranks.items():
        for tau in X.faces(sigma):
            if tau != sigma and C.rank(tau, n) and rng.random() < density:
                N[(tau, sigma, n)] = _rand_matrix(rng, C.rank(tau, n), r, -1, 1)
    diag, diag_inv = {}, {}
    for (s, n), r in C.ranks.items():
        a, ai = _unimodular(rng, r)
        diag[(s, s, n)], diag_inv[(s, s, n)] = a, ai
    one = C.identity()
    Nop = GradedChainMap(C, C, N)
    phi = GradedChainMap(C, C, diag) @ (one + Nop)
    # (1 + N)^{-1} = sum (-N)^k, N nilpotent
    inv = one
    term = one
    for _ in range(X.dim + 1):
        term = -(Nop @ term)
        inv = inv + term
    phi_inv = inv @ GradedChainMap(C, C, diag_inv)
    d = phi @ C.d @ phi_inv
    return GradedChainComplex(C.base, C.variant, C.ranks, d.blocks)


def random_homotopy(C: GradedChainComplex, D: GradedChainComplex, rng: random.Random, variant: str | None = None,
                    density: float = 0.4) -> GradedHomotopy:
    variant = variant or C.variant
    blocks = {}
    for (s, n), r in C.ranks.items():
        for (t, k), q in D.ranks.items():
            if k != n + 1 or rng.random() > density:
                continue
            if variant == COSTAR and not is_face(t, s):
                continue
            if variant == STAR and not is_face(s, t):
                continue
            blocks[(t, s, n)] = _rand_matrix(rng, q, r, -1, 1)
    return GradedHomotopy(C, D, blocks)


def random_chain_map(C: GradedChainComplex, D: GradedChainComplex, rng: random.Random) -> GradedChainMap:
    """dH + Hd for a random triangular H, plus a multiple of 1 when C is D."""
    H = random_homotopy(C, D, rng)
    f = (D.d @ H) + (H @ C.d)
    f = GradedChainMap(C, D, f.blocks)
    if C is D:
        f = f + C.identity().scaled(rng.choice([-1, 1, 2]))
    return f


def perturbation_equivalence(E: GradedChainComplex, rng: random.Random, far: bool = False):
    """f = 1 + dH + Hd on a costar complex E over a subdivision, with g = 1 - (dH + Hd).

    H is a single block C(s)_n -> C(t)_{n+1} for incomparable s, t, so
    H^2 = 0 and H d H = 0 and f g = g f = 1 exactly.  By default s and t
    share the vertex whose closed star is smallest and the pair with the
    smallest bound is kept; ``far`` takes s and t near opposite corners and
    keeps the largest bound.
    """
    K, coords = _coords_of(E.base)
    slots = sorted(E.ranks, key=lambda k: (len(k[0]), k[0], k[1]))

    def closed_star(v):
        return {f for c in K.cofaces((v,)) for f in faces_of(c)}

    def candidates(v, w):
        near_w = closed_star(w)
        return [(s, t, n) for s, n in slots if v in s
                for t, k in slots if k == n + 1 and t in near_w and not is_face(s, t) and not is_face(t, s)]

    fine = E.base if isinstance(E.base, SubdividedComplex) else None
    metric = BarycentreMetric(fine.base if fine is not None else K, fine)

    def pick(pairs):
        best = None
        rng.shuffle(pairs)
        for s, t, n in pairs:
            blk = _rand_matrix(rng, E.rank(t, n + 1), E.rank(s, n), -1, 1)
            if intmat.is_zero(blk):
                continue
            N = GradedHomotopy(E, E, {(t, s, n): blk}).boundary()
            if N.respects(E.variant):
                continue
            b = _op_bound([N], metric).value
            if best is None or (b > best[0] if far else b < best[0]):
                best = (b, N)
        return best

    if far:
        corners = [v for v in K.vertices if len(coords[v]) == 1]
        best = pick(candidates(corners[0], corners[-1]))
    else:
        def star_diam(v):
            vs = {w for c in K.cofaces((v,)) for w in c}
            return max(squared_distance(coords[a], coords[b]) for a in vs for b in vs)

        best = None
        for v in sorted(K.vertices, key=lambda v: (star_diam(v), v)):
            best = pick(candidates(v, v))
            if best is not None:
                break
    if best is None:
        raise ParameterError("no incomparable pair of simplices gives a non-triangular perturbation")
    N = best[1]
    one = E.identity()
    E_full = E.with_variant(FULL)
    f = GradedChainMap(E_full, E_full, (one + N).blocks)
    g = GradedChainMap(E_full, E_full, (one - N).blocks)
    zero = GradedHomotopy(E_full, E_full, {})
    return EquivalenceCertificate(f, g, zero, zero)


NAMED_MAPS = {
    # the letter T folded onto its stem
    "t-projection": ([[0, 1], [1, 2], [1, 3]], [[0, 1], [1, 2]], {0: 0, 1: 1, 2: 2, 3: 1}),
    "hollow-collapse": ([[0, 1], [1, 2], [0, 2]], [[0]], {0: 0, 1: 0, 2: 0}),
    "delta3-to-delta1": ([[0, 1, 2, 3]], [[0, 1]], {0: 0, 1: 0, 2: 1, 3: 1}),
    "delta2-to-delta1": ([[0, 1, 2]], [[0, 1]], {0: 0, 1: 1, 2: 1}),
    "identity-delta2": ([[0, 1, 2]], [[0, 1, 2]], {0: 0, 1: 1, 2: 2}),
}


def named_map(name: str) -> SimplicialMap:
    src, tgt, vm = NAMED_MAPS[name]
    return SimplicialMap(build_complex(src), build_complex(tgt), dict(vm))
