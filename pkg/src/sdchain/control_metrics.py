"""Metric bookkeeping in the standard metric.

Each base simplex is embedded as the standard simplex spanned by the unit
vectors of its vertices, so a point is a finite map vertex -> coordinate.
Subdivisions are always measured in the base.  Squares of distances are
exact rationals; irrational quantities are only ever compared through
their squares.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ParameterError
from .simplicial_core import (
    Simplex,
    SimplicialComplex,
    SubdividedComplex,
    _sqrt_less,
    faces_of,
    iterated_subdivision,
    squared_distance,
    subdivision_mesh_sq,
)

Point = Mapping[int, Fraction]
INF = math.inf


def sqrt_float(q) -> float:
    if q is None:
        return INF
    return math.sqrt(Fraction(q)) if not isinstance(q, float) else math.sqrt(q)


def _decimal_sqrt(q: Fraction) -> Decimal:
    getcontext().prec = 40
    return (Decimal(q.numerator) / Decimal(q.denominator)).sqrt()


# ---------------------------------------------------------------- simplex geometry


def _gram_det(points: list[Point]) -> Fraction:
    """Determinant of the Gram matrix of edge vectors from points[0]."""
    if len(points) <= 1:
        return Fraction(1)
    keys = sorted({k for p in points for k in p})
    p0 = points[0]
    vecs = [[p.get(k, Fraction(0)) - p0.get(k, Fraction(0)) for k in keys] for p in points[1:]]
    n = len(vecs)
    g = [[sum((a * b for a, b in zip(vecs[i], vecs[j])), Fraction(0)) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if g[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            g[c], g[piv] = g[piv], g[c]
            det = -det
        det *= g[c][c]
        for r in range(c + 1, n):
            f = g[r][c] / g[c][c]
            if f:
                g[r] = [x - f * y for x, y in zip(g[r], g[c])]
    return det


def volume_sq(points: list[Point]) -> Fraction:
    n = len(points) - 1
    return _gram_det(points) / (math.factorial(n) ** 2)


def diameter_sq(points: list[Point]) -> Fraction:
    best = Fraction(0)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = max(best, squared_distance(points[i], points[j]))
    return best


def inradius(points: list[Point]) -> Decimal:
    """n V / (sum of facet volumes), evaluated to 40 significant digits."""
    n = len(points) - 1
    if n == 0:
        return Decimal(0)
    v = _decimal_sqrt(volume_sq(points))
    facets = sum(_decimal_sqrt(volume_sq(points[:i] + points[i + 1:])) for i in range(n + 1))
    return n * v / facets


def standard_rad_sq(n: int) -> Fraction:
    return Fraction(1, n * (n + 1))


# ---------------------------------------------------------------- reports


@dataclass
class MetricReport:
    """``mesh_sq`` is exact; ``comesh_sq`` is exact when rational, else None.

    ``per_simplex[s] = (diam_sq, rad)`` with ``rad`` a Decimal.
    """

    mesh_sq: Fraction
    comesh: Decimal | None
    comesh_sq: Fraction | None
    per_simplex: dict[Simplex, tuple[Fraction, Decimal]] = field(default_factory=dict)

    @property
    def mesh(self) -> float:
        return math.sqrt(self.mesh_sq)

    @property
    def comesh_value(self) -> float:
        return INF if self.comesh is None else float(self.comesh)

    def to_json(self) -> dict:
        return {
            "mesh_sq": str(self.mesh_sq),
            "mesh": self.mesh,
            "comesh_sq": None if self.comesh_sq is None else str(self.comesh_sq),
            "comesh": "inf" if self.comesh is None else float(self.comesh),
        }


def _coords_of(S) -> tuple[SimplicialComplex, Mapping[int, Point]]:
    if isinstance(S, SubdividedComplex):
        return S.complex, S.coords
    return S, {v: {v: Fraction(1)} for v in S.vertices}


def metric_report(X: SimplicialComplex, level: int = 0) -> MetricReport:
    if level < 0:
        raise ParameterError("level must be nonnegative")
    per: dict[Simplex, tuple[Fraction, Decimal]] = {}
    if level == 0:
        for s in X.simplices:
            n = len(s) - 1
            if n == 0:
                per[s] = (Fraction(0), Decimal(0))
            else:
                per[s] = (Fraction(2), _decimal_sqrt(standard_rad_sq(n)))
        pos = [len(s) - 1 for s in X.simplices if len(s) > 1]
        if not pos:
            return MetricReport(Fraction(0), None, None, per)
        top = max(pos)
        return MetricReport(Fraction(2), _decimal_sqrt(standard_rad_sq(top)), standard_rad_sq(top), per)
    S = iterated_subdivision(X, level)
    K, coords = _coords_of(S)
    mesh_sq = Fraction(0)
    comesh = None
    for s in K.simplices:
        pts = [coords[v] for v in s]
        d2 = diameter_sq(pts)
        rad = inradius(pts)
        per[s] = (d2, rad)
        mesh_sq = max(mesh_sq, d2)
        if len(s) > 1 and (comesh is None or rad < comesh):
            comesh = rad
    return MetricReport(mesh_sq, comesh, None, per)


def verify_mesh_decay(X: SimplicialComplex, i: int) -> bool:
    """mesh(Sd^i X)^2 < (n/(n+1))^(2i) mesh(X)^2, exactly."""
    n = X.dim
    if n < 1:
        raise ParameterError("mesh decay needs a positive-dimensional complex")
    if i < 1:
        raise ParameterError("level must be at least 1")
    lhs = subdivision_mesh_sq(iterated_subdivision(X, i))
    return lhs < Fraction(n, n + 1) ** (2 * i) * 2


# ---------------------------------------------------------------- squeezing parameters


@dataclass(frozen=True)
class SqueezeParams:
    alpha: Fraction
    epsilon_sq: Fraction
    i: int
    log_ratio: float

    @property
    def epsilon(self) -> float:
        return math.sqrt(self.epsilon_sq)

    def to_json(self) -> dict:
        return {"alpha": str(self.alpha), "epsilon_sq": str(self.epsilon_sq), "epsilon": self.epsilon, "i": self.i,
                "log_ratio": self.log_ratio}


def squeeze_params(X: SimplicialComplex, alpha) -> SqueezeParams:
    """epsilon = alpha comesh(X), i = ceil(ln A / ln B) + 1.

    Here A = (1 - alpha) comesh / (2 mesh) and B = n/(n+1).  The ceiling is
    the least k >= 0 with B^k <= A, found exactly by comparing B^(2k) with
    the rational A^2.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie strictly between 0 and 1")
    n = X.dim
    if n < 1:
        raise ParameterError("squeezing needs a positive-dimensional complex")
    comesh_sq = standard_rad_sq(n)
    mesh_sq = Fraction(2)
    a_sq = (1 - alpha) ** 2 * comesh_sq / (4 * mesh_sq)
    b = Fraction(n, n + 1)
    k = 0
    while b ** (2 * k) > a_sq:
        k += 1
    log_ratio = (math.log(a_sq) / 2) / math.log(b)
    return SqueezeParams(alpha, alpha ** 2 * comesh_sq, k + 1, log_ratio)


def squeeze_chain_holds(X: SimplicialComplex, p: SqueezeParams) -> bool:
    """epsilon < comesh(X) - 2 (n/(n+1))^i mesh(X), exactly."""
    n = X.dim
    b = Fraction(n, n + 1)
    return _sqrt_less(p.epsilon_sq, standard_rad_sq(n), b ** (2 * p.i) * 2)


def feasible_at(X: SimplicialComplex, epsilon_sq: Fraction, level: int) -> bool:
    """epsilon < comesh(X) - 2 mesh(Sd^level X) using the actual mesh."""
    S = iterated_subdivision(X, level)
    return _sqrt_less(Fraction(epsilon_sq), standard_rad_sq(X.dim), subdivision_mesh_sq(S))


def minimal_feasible_level(X: SimplicialComplex, alpha, max_level: int = 6) -> int | None:
    """Least level whose actual mesh satisfies the squeeze inequality."""
    eps_sq = Fraction(alpha) ** 2 * standard_rad_sq(X.dim)
    for i in range(1, max_level + 1):
        if feasible_at(X, eps_sq, i):
            return i
    return None


# ---------------------------------------------------------------- barycentre-graph metric


def barycentre(coords: Mapping[int, Point], s: Simplex) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {}
    for v in s:
        for b, c in coords[v].items():
            acc[b] = acc.get(b, Fraction(0)) + c
    return {b: c / len(s) for b, c in acc.items()}


class BarycentreMetric:
    """Shortest paths through barycentres, hopping inside closed base simplices.

    Two points in a common closed base simplex are joined directly.  Other
    pairs route through portal barycentres, i.e. barycentres of the finest
    subdivision that lie on non-maximal base simplices.
    """

    def __init__(self, base: SimplicialComplex, finest: SubdividedComplex | SimplicialComplex | None = None):
        self.base = base
        K, coords = _coords_of(finest if finest is not None else base)
        maximal = set(base.maximal())
        seen = {}
        for s in K.simplices:
            p = barycentre(coords, s)
            supp = tuple(sorted(p))
            if supp not in maximal:
                seen[tuple(sorted(p.items()))] = p
        self.portals = list(seen.values())

    def shares_simplex(self, p: Point, q: Point) -> bool:
        return tuple(sorted(set(p) | set(q))) in self.base

    def distance(self, p: Point, q: Point) -> tuple[float, Fraction | None]:
        """(distance, exact square or None when routed through portals)."""
        if self.shares_simplex(p, q):
            d2 = squared_distance(p, q)
            return math.sqrt(d2), d2
        nodes = [p] + self.portals + [q]
        dist = [INF] * len(nodes)
        dist[0] = 0.0
        heap = [(0.0, 0)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            if u == len(nodes) - 1:
                return d, None
            for v in range(1, len(nodes)):
                if v != u and self.shares_simplex(nodes[u], nodes[v]):
                    nd = d + math.sqrt(squared_distance(nodes[u], nodes[v]))
                    if nd < dist[v]:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
        return INF, None


def _geometry(base_obj) -> tuple[SimplicialComplex, Mapping[int, Point]]:
    if isinstance(base_obj, SubdividedComplex):
        return base_obj.base, base_obj.coords
    return base_obj, {v: {v: Fraction(1)} for v in base_obj.vertices}


@dataclass(frozen=True)
class Bound:
    value: float
    sq: Fraction | None

    def below(self, epsilon_sq: Fraction) -> bool:
        if self.sq is not None:
            return self.sq < epsilon_sq
        # routed distances are sums of square roots; keep a relative margin
        return self.value < math.sqrt(epsilon_sq) * (1 - 1e-12)

    def __float__(self) -> float:
        return self.value


def _op_bound(ops, metric: BarycentreMetric | None) -> Bound:
    pairs: dict = {}
    for op in ops:
        src_base, src_coords = _geometry(op.source.base)
        _tgt_base, tgt_coords = _geometry(op.target.base)
        if metric is None:
            metric = BarycentreMetric(src_base)
        for (t, s, _n) in op.blocks:
            key = (id(tgt_coords), t, id(src_coords), s)
            if key not in pairs:
                pairs[key] = metric.distance(barycentre(src_coords, s), barycentre(tgt_coords, t))
    if not pairs:
        return Bound(0.0, Fraction(0))
    if all(sq is not None for _v, sq in pairs.values()):
        top = max(sq for _v, sq in pairs.values())
        return Bound(math.sqrt(top), top)
    return Bound(max(v for v, _sq in pairs.values()), None)


def morphism_bound(f, base=None) -> Bound:
    """Largest barycentre-graph distance spanned by a nonzero block of ``f``."""
    metric = None
    if base is not None:
        X = base.base if isinstance(base, SubdividedComplex) else base
        metric = BarycentreMetric(X, base if isinstance(base, SubdividedComplex) else None)
    return _op_bound([f], metric)


def package_bound(ops: Iterable, finest=None) -> Bound:
    """Bound of an equivalence package (map, inverse, homotopies)."""
    ops = list(ops)
    metric = None
    if finest is not None:
        X = finest.base if isinstance(finest, SubdividedComplex) else finest
        metric = BarycentreMetric(X, finest if isinstance(finest, SubdividedComplex) else None)
    return _op_bound(ops, metric)


def epsilon_neighbourhood(S: SubdividedComplex | SimplicialComplex, target: Iterable[Simplex], eps) -> set[Simplex]:
    """Closure of the simplices with a vertex within ``eps`` of a target vertex."""
    K, coords = _coords_of(S)
    X = S.base if isinstance(S, SubdividedComplex) else S
    metric = BarycentreMetric(X, S if isinstance(S, SubdividedComplex) else None)
    target = [K.check(t) for t in target]
    tverts = sorted({v for t in target for v in t})
    eps_f = float(eps)
    eps_sq = Fraction(eps) ** 2 if not isinstance(eps, float) else None
    near = set()
    for v in K.vertices:
        for w in tverts:
            d, d2 = metric.distance(coords[v], coords[w])
            ok = (d2 <= eps_sq) if (d2 is not None and eps_sq is not None) else d <= eps_f
            if ok:
                near.add(v)
                break
    out = set()
    for s in K.simplices:
        if any(v in near for v in s):
            out.update(faces_of(s))
    for t in target:
        out.update(faces_of(t))
    return out
