"""Finite simplicial complexes, barycentric subdivision and approximation data.

A simplex is a strictly increasing tuple of integer vertex ids.  Every
simplex is oriented by that increasing order.  Subdivision vertices are
numbered by sorting the parent simplices by (dimension, tuple), so a flag
read in dimension order is also its sorted vertex tuple.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import intmat
from .errors import (
    EmptyComplexError,
    MalformedSimplexError,
    ParameterError,
    SqueezeInfeasibleError,
    UnknownSimplexError,
)

Simplex = tuple[int, ...]

MIN_VERTEX = "min-vertex"
BOUNDARY_RETRACTING = "boundary-retracting"
POLICIES = (MIN_VERTEX, BOUNDARY_RETRACTING)


def simplex_key(s: Simplex):
    return (len(s), s)


def perm_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def is_face(a: Simplex, b: Simplex) -> bool:
    return set(a) <= set(b)


def faces_of(s: Simplex, proper: bool = False) -> list[Simplex]:
    out = []
    top = len(s) - 1 if proper else len(s)
    for k in range(1, top + 1):
        out.extend(itertools.combinations(s, k))
    return out


def boundary_faces(s: Simplex) -> list[tuple[int, Simplex]]:
    """Codimension-one faces with their incidence sign (-1)^i."""
    if len(s) <= 1:
        return []
    return [((-1) ** i, s[:i] + s[i + 1:]) for i in range(len(s))]


class SimplicialComplex:
    """Immutable finite abstract simplicial complex."""

    def __init__(self, vertices: Iterable[int], simplices: Iterable[Simplex]):
        self.vertices: tuple[int, ...] = tuple(sorted(set(vertices)))
        simps = sorted(set(tuple(s) for s in simplices), key=simplex_key)
        if not simps:
            raise EmptyComplexError("the empty complex is not supported")
        self.simplices: tuple[Simplex, ...] = tuple(simps)
        self._set = frozenset(simps)
        self.dim = max(len(s) for s in simps) - 1

    def __contains__(self, s) -> bool:
        return tuple(s) in self._set

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self._set == other._set and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        return f"SimplicialComplex(vertices={len(self.vertices)}, simplices={len(self.simplices)}, dim={self.dim})"

    @cached_property
    def _by_dim(self) -> dict[int, list[Simplex]]:
        out: dict[int, list[Simplex]] = {n: [] for n in range(self.dim + 1)}
        for s in self.simplices:
            out[len(s) - 1].append(s)
        return out

    def of_dim(self, n: int) -> list[Simplex]:
        return list(self._by_dim.get(n, []))

    def index(self, n: int) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self._by_dim.get(n, []))}

    @cached_property
    def _cofaces(self) -> dict[Simplex, tuple[Simplex, ...]]:
        out: dict[Simplex, list[Simplex]] = {s: [] for s in self.simplices}
        for s in self.simplices:
            for f in faces_of(s):
                out[f].append(s)
        return {s: tuple(v) for s, v in out.items()}

    def faces(self, s: Simplex) -> list[Simplex]:
        """All faces of ``s`` including ``s``, in canonical order."""
        self.check(s)
        return sorted(faces_of(s), key=simplex_key)

    def cofaces(self, s: Simplex) -> tuple[Simplex, ...]:
        """All simplices having ``s`` as a face, including ``s``."""
        self.check(s)
        return self._cofaces[tuple(s)]

    def check(self, s) -> Simplex:
        s = tuple(s)
        if s not in self._set:
            raise UnknownSimplexError(f"{s} is not a simplex of the complex")
        return s

    def maximal(self) -> list[Simplex]:
        return [s for s in self.simplices if len(self._cofaces[s]) == 1]

    def is_pure(self) -> bool:
        return all(len(s) == self.dim + 1 for s in self.maximal())

    def link(self, s: Simplex) -> list[Simplex]:
        """Simplices of the link of ``s`` (possibly empty)."""
        s = self.check(s)
        ss = set(s)
        out = set()
        for c in self._cofaces[s]:
            rest = tuple(v for v in c if v not in ss)
            if rest:
                out.add(rest)
        return sorted(out, key=simplex_key)

    def subcomplex(self, simplices: Iterable[Simplex]) -> "SimplicialComplex":
        closure = set()
        for s in simplices:
            closure.update(faces_of(self.check(s)))
        return SimplicialComplex(sorted({v for s in closure for v in s}), closure)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "maximal": [list(s) for s in self.maximal()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "SimplicialComplex":
        if not isinstance(data, Mapping) or "maximal" not in data:
            raise MalformedSimplexError("complex JSON needs a 'maximal' field")
        return build_complex(data["maximal"], data.get("vertices"))


def build_complex(maximal_simplices: Iterable[Iterable[int]], vertices: Iterable[int] | None = None) -> SimplicialComplex:
    maximal = []
    for raw in maximal_simplices:
        try:
            t = [int(v) for v in raw]
        except (TypeError, ValueError) as exc:
            raise MalformedSimplexError(f"simplex {raw!r} is not a list of integers") from exc
        if not t:
            raise MalformedSimplexError("empty simplex")
        if len(set(t)) != len(t):
            raise MalformedSimplexError(f"duplicate vertex in simplex {raw!r}")
        maximal.append(tuple(sorted(t)))
    if not maximal:
        raise EmptyComplexError("the empty complex is not supported")
    used = {v for s in maximal for v in s}
    if vertices is not None:
        declared = {int(v) for v in vertices}
        missing = used - declared
        if missing:
            raise MalformedSimplexError(f"vertices {sorted(missing)} are not declared")
        if declared - used:
            # isolated declared vertices become 0-simplices
            maximal.extend((v,) for v in sorted(declared - used))
            used = declared
    closure = set()
    for s in maximal:
        closure.update(faces_of(s))
    return SimplicialComplex(sorted(used), closure)


def standard_simplex(n: int) -> SimplicialComplex:
    return build_complex([list(range(n + 1))])


def boundary_matrix(X: SimplicialComplex, n: int) -> np.ndarray:
    """Rows: (n-1)-simplices, columns: n-simplices, canonical order."""
    if n < 0 or n > X.dim:
        raise ParameterError(f"degree {n} outside 0..{X.dim}")
    cols = X.of_dim(n)
    rows = X.index(n - 1) if n > 0 else {}
    m = intmat.zeros(len(rows), len(cols))
    for j, s in enumerate(cols):
        for sign, f in boundary_faces(s):
            m[rows[f], j] = sign
    return m


# ---------------------------------------------------------------- subdivision


@dataclass(frozen=True, eq=False)
class SubdividedComplex:
    """``complex`` is Sd of ``parent`` (or of ``base`` at level 1).

    ``barycentre[w]`` is the parent simplex whose barycentre is vertex ``w``;
    ``coords[w]`` gives barycentric coordinates of ``w`` in the base complex.
    """

    complex: SimplicialComplex
    base: SimplicialComplex
    parent_complex: SimplicialComplex
    barycentre: Mapping[int, Simplex]
    coords: Mapping[int, Mapping[int, Fraction]]
    level: int
    parent: "SubdividedComplex | None" = None

    @cached_property
    def vertex_of(self) -> dict[Simplex, int]:
        return {s: w for w, s in self.barycentre.items()}

    @cached_property
    def carrier(self) -> dict[Simplex, Simplex]:
        out = {}
        for s in self.complex.simplices:
            top = self.barycentre[s[-1]]
            out[s] = self.parent.carrier[top] if self.parent is not None else top
        return out

    def flag(self, s: Simplex) -> tuple[Simplex, ...]:
        return tuple(self.barycentre[w] for w in s)

    def chain(self) -> list["SubdividedComplex"]:
        """Levels from 1 up to this one."""
        out = []
        cur: SubdividedComplex | None = self
        while cur is not None:
            out.append(cur)
            cur = cur.parent
        return out[::-1]


def _flags(parent: SimplicialComplex) -> list[tuple[Simplex, ...]]:
    flags: list[tuple[Simplex, ...]] = []

    def extend(fl):
        flags.append(fl)
        for c in parent.cofaces(fl[-1]):
            if len(c) > len(fl[-1]):
                extend(fl + (c,))

    for s in parent.simplices:
        extend((s,))
    return flags


def barycentric_subdivide(X: "SimplicialComplex | SubdividedComplex") -> SubdividedComplex:
    if isinstance(X, SubdividedComplex):
        parent_sd: SubdividedComplex | None = X
        parent = X.complex
        base = X.base
        parent_coords = X.coords
        level = X.level + 1
    else:
        parent_sd = None
        parent = X
        base = X
        parent_coords = {v: {v: Fraction(1)} for v in X.vertices}
        level = 1
    bary = {i: s for i, s in enumerate(parent.simplices)}
    vid = {s: i for i, s in bary.items()}
    coords = {}
    for w, s in bary.items():
        acc: dict[int, Fraction] = {}
        for v in s:
            for b, c in parent_coords[v].items():
                acc[b] = acc.get(b, Fraction(0)) + c
        coords[w] = {b: c / len(s) for b, c in sorted(acc.items())}
    simplices = [tuple(vid[s] for s in fl) for fl in _flags(parent)]
    K = SimplicialComplex(bary.keys(), simplices)
    return SubdividedComplex(K, base, parent, bary, coords, level, parent_sd)


def iterated_subdivision(X: SimplicialComplex, levels: int) -> SubdividedComplex:
    if levels < 1:
        raise ParameterError("levels must be at least 1")
    S = barycentric_subdivide(X)
    for _ in range(levels - 1):
        S = barycentric_subdivide(S)
    return S


def squared_distance(a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Fraction:
    keys = set(a) | set(b)
    return sum(((a.get(k, Fraction(0)) - b.get(k, Fraction(0))) ** 2 for k in keys), Fraction(0))


def subdivision_mesh_sq(S: SubdividedComplex) -> Fraction:
    """Largest squared edge length of ``S`` measured in the base."""
    best = Fraction(0)
    for e in S.complex.of_dim(1):
        best = max(best, squared_distance(S.coords[e[0]], S.coords[e[1]]))
    return best


# ---------------------------------------------------------------- dual cells


@dataclass(frozen=True)
class DualCell:
    center: Simplex
    closed: frozenset
    boundary: frozenset
    open: frozenset


def dual_cell(sigma: Simplex, X: SimplicialComplex) -> DualCell:
    """Dual cell of ``sigma``; members are flags of base simplices."""
    sigma = X.check(sigma)
    closed, bdry = set(), set()
    for fl in _flags(X):
        if is_face(sigma, fl[0]):
            closed.add(fl)
            if fl[0] != sigma:
                bdry.add(fl)
    return DualCell(sigma, frozenset(closed), frozenset(bdry), frozenset(closed - bdry))


# ---------------------------------------------------------------- approximation data


def _depth_sq(coords: Mapping[int, Fraction]) -> Fraction:
    """Squared distance from a point to the boundary of its open carrier."""
    k = len(coords) - 1
    if k == 0:
        return Fraction(0)
    t = min(coords.values())
    return t * t * Fraction(k + 1, k)


class LevelStep:
    """One barycentric subdivision ``child = Sd parent`` with a vertex choice r.

    ``r`` sends every child vertex (a parent barycentre) to the parent vertex
    of smallest priority.  Under canonical priority this is the min-vertex
    rule; boundary-retracting priority orders parent vertices by carrier
    dimension and then depth inside the carrier, pushing everything that is
    not the distinguished simplex towards the boundary.
    """

    def __init__(self, sub: SubdividedComplex, priority: Mapping[int, int]):
        self.sub = sub
        self.parent = sub.parent_complex
        self.child = sub.complex
        self.priority = dict(priority)
        self.r = {w: min(s, key=self.priority.__getitem__) for w, s in sub.barycentre.items()}
        self.vertex_of = sub.vertex_of

    # -- r on simplices
    @cached_property
    def image(self) -> dict[Simplex, Simplex]:
        return {s: tuple(sorted({self.r[w] for w in s})) for s in self.child.simplices}

    def offset(self, s: Simplex) -> int:
        return len(s) - len(self.image[s])

    @cached_property
    def I(self) -> dict[Simplex, tuple[Simplex, ...]]:
        out: dict[Simplex, list[Simplex]] = {s: [] for s in self.parent.simplices}
        for s in self.child.simplices:
            out[self.image[s]].append(s)
        return {k: tuple(v) for k, v in out.items()}

    def fibres(self, s: Simplex) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for w in s:
            out.setdefault(self.r[w], []).append(w)
        return out

    def o_order(self, s: Simplex) -> list[int]:
        """Orientation used for Sd of chain complexes.

        One representative per r-fibre (its first vertex) in the order of the
        image vertices, followed by the remaining vertices in sorted order.
        """
        fib = self.fibres(s)
        reps = [fib[v][0] for v in sorted(fib)]
        extras = sorted(w for v in fib for w in fib[v][1:])
        return reps + extras

    @cached_property
    def _o_sign(self) -> dict[Simplex, int]:
        return {s: perm_sign(self.o_order(s)) for s in self.child.simplices}

    def o_sign(self, s: Simplex) -> int:
        return self._o_sign[s]

    def o_incidence(self, face: Simplex, s: Simplex) -> int:
        i = s.index(next(w for w in s if w not in face))
        return (-1) ** i * self._o_sign[s] * self._o_sign[face]

    def restrict_preimage(self, s: Simplex, tau: Simplex) -> Simplex | None:
        """``s ∩ r^{-1}(tau)`` when it has the same offset as ``s``."""
        ts = set(tau)
        fib = self.fibres(s)
        if any(len(fib[v]) != 1 for v in fib if v not in ts):
            return None
        return tuple(w for w in s if self.r[w] in ts)

    # -- forest
    @cached_property
    def forest(self) -> frozenset[tuple[int, int]]:
        edges = set()
        for w, s in self.sub.barycentre.items():
            if len(s) > 1:
                a, b = sorted((w, self.vertex_of[(self.r[w],)]))
                edges.add((a, b))
        return frozenset(edges)

    # -- simplicial chain maps
    def subdivision_chain(self, sigma: Simplex) -> dict[Simplex, int]:
        """s(sigma): signed sum of top simplices of Sd sigma."""
        out = {}
        for perm in itertools.permutations(sigma):
            flag = tuple(tuple(sorted(perm[: k + 1])) for k in range(len(perm)))
            simplex = tuple(self.vertex_of[f] for f in flag)
            out[simplex] = perm_sign(perm)
        return out

    def retract_simplex(self, s: Simplex) -> tuple[int, Simplex] | None:
        img = [self.r[w] for w in s]
        if len(set(img)) != len(img):
            return None
        return perm_sign(img), tuple(sorted(img))

    # -- gamma cells
    def _descending(self, tau: Simplex) -> list[int]:
        return sorted(tau, key=self.priority.__getitem__, reverse=True)

    def _cell(self, tau: Simplex, chain: tuple[Simplex, ...]) -> list[tuple[Simplex, int]]:
        """Top simplices of Gamma_chain(tau), signed against canonical order.

        The product tau x Delta^i is triangulated by staircase paths; the
        sign is that of the product orientation [tau] x [chain].
        """
        q = self._descending(tau)
        pr = self.priority
        a, m = len(q) - 1, len(chain) - 1
        base_sign = perm_sign(q)

        def g(j, k):
            thr = pr[q[k]]
            return tuple(w for w in chain[j] if pr[w] >= thr)

        out = []

        def walk(k, j, sets, inv, ls_so_far):
            if k == a and j == m:
                verts = [self.vertex_of[x] for x in sets]
                out.append((tuple(sorted(verts)), base_sign * (-1) ** inv * perm_sign(verts)))
                return
            if k < a:
                walk(k + 1, j, sets + [g(j, k + 1)], inv + ls_so_far, ls_so_far)
            if j < m:
                nxt = g(j + 1, k)
                if nxt != sets[-1]:
                    walk(k, j + 1, sets + [nxt], inv, ls_so_far + 1)

        walk(0, 0, [g(0, 0)], 0, 0)
        return out

    def gamma_pieces(self, tau: Simplex, chain: tuple[Simplex, ...]) -> list[tuple[Simplex, int]]:
        """Top simplices of Gamma_chain(tau), signed against ``o_order``.

        Empty when the cell is degenerate.
        """
        return [(s, sign * self._o_sign[s]) for s, sign in self._cell(tau, chain)]

    def chains_from(self, start: Simplex, stop: Simplex) -> list[tuple[Simplex, ...]]:
        """Strict chains start = c0 < ... < ci = stop in the parent."""
        if start == stop:
            return [(start,)]
        out = []
        for c in self.parent.cofaces(start):
            if c != start and is_face(c, stop):
                out.extend((start,) + rest for rest in self.chains_from(c, stop))
        return out

    @cached_property
    def gamma(self) -> dict[Simplex, tuple[tuple[Simplex, ...], Simplex]]:
        """A label (chain, tau) for every child simplex that tops a Gamma cell.

        Cells with smaller chains are visited first, so simplices shared by
        several coincident cells get the shortest label.
        """
        cells = []
        for tau in self.parent.simplices:
            for sigma0 in self.parent.cofaces(tau):
                for top in self.parent.cofaces(sigma0):
                    for ch in self.chains_from(sigma0, top):
                        cells.append((len(ch), ch, tau))
        cells.sort(key=lambda c: (c[0], [simplex_key(x) for x in c[1]], simplex_key(c[2])))
        out: dict[Simplex, tuple[tuple[Simplex, ...], Simplex]] = {}
        for _, ch, tau in cells:
            for s, _sign in self.gamma_pieces(tau, ch):
                out.setdefault(s, (ch, tau))
        return out

    def cells(self):
        """Every (tau, chain) with tau <= chain[0], in canonical order."""
        for tau in self.parent.simplices:
            for sigma0 in self.parent.cofaces(tau):
                for top in self.parent.cofaces(sigma0):
                    yield from ((tau, ch) for ch in self.chains_from(sigma0, top))

    @cached_property
    def gamma_boundary(self) -> list[tuple[Simplex, Simplex, str, int, int]]:
        """Boundary incidences of Gamma cells: (face, top, kind, j, sign).

        ``kind`` is "chain" for the face obtained by deleting chain[j] and
        "tau" for faces over a facet of tau (j is then the deleted vertex's
        index).  Signs are taken after desuspending by tau, i.e. chain faces
        carry (-1)^|tau| times the product incidence and tau faces carry the
        product incidence times [tau' : tau].
        """
        out = []
        for tau, ch in self.cells():
            top = self._cell(tau, ch)
            if not top:
                continue
            faces: list[tuple[str, int, list, int]] = []
            if len(ch) > 1:
                for j in range(len(ch)):
                    sub = ch[:j] + ch[j + 1:]
                    if is_face(tau, sub[0]):
                        faces.append(("chain", j, self._cell(tau, sub), (-1) ** (len(tau) - 1)))
            for inc, facet in boundary_faces(tau):
                faces.append(("tau", tau.index(next(v for v in tau if v not in facet)), self._cell(facet, ch), inc))
            for A, pa in top:
                for kind, j, fpieces, extra in faces:
                    for F, pf in fpieces:
                        if len(F) == len(A) - 1 and is_face(F, A):
                            k = A.index(next(w for w in A if w not in F))
                            out.append((F, A, kind, j, extra * (-1) ** k * pa * pf))
        return out

    @cached_property
    def gamma_signs(self) -> dict[tuple[Simplex, Simplex], int]:
        """Sign of each Gamma-cell boundary incidence, keyed (face, top)."""
        out = {}
        for F, A, _kind, _j, sign in self.gamma_boundary:
            out.setdefault((F, A), sign)
        return out


def _priority_order(sub: SubdividedComplex, policy: str) -> dict[int, int]:
    parent_vertices = sub.parent_complex.vertices
    if policy == MIN_VERTEX:
        return {v: i for i, v in enumerate(parent_vertices)}
    if sub.parent is None:
        coords = {v: {v: Fraction(1)} for v in parent_vertices}
    else:
        coords = sub.parent.coords

    def key(v):
        c = coords[v]
        return (len(c), _depth_sq(c), v)

    return {v: i for i, v in enumerate(sorted(parent_vertices, key=key))}


@dataclass(frozen=True, eq=False)
class SubdivisionData:
    """Approximation data for an (iterated) subdivision.

    Composite fields (``r_vertex_map``, ``I_partition``, ``forest``) are
    relative to the base complex; ``gamma`` and ``gamma_signs`` describe the
    last level relative to its parent.
    """

    subdivision: SubdividedComplex
    steps: tuple[LevelStep, ...]
    policy: str

    @property
    def base(self) -> SimplicialComplex:
        return self.subdivision.base

    @property
    def level(self) -> int:
        return self.subdivision.level

    @cached_property
    def r_vertex_map(self) -> dict[int, int]:
        cur = dict(self.steps[0].r)
        for step in self.steps[1:]:
            cur = {w: cur[v] for w, v in step.r.items()}
        return cur

    def image(self, s: Simplex) -> Simplex:
        rv = self.r_vertex_map
        return tuple(sorted({rv[w] for w in s}))

    @cached_property
    def I_partition(self) -> dict[Simplex, frozenset[Simplex]]:
        out: dict[Simplex, set] = {s: set() for s in self.base.simplices}
        for s in self.subdivision.complex.simplices:
            out[self.image(s)].add(s)
        return {k: frozenset(v) for k, v in out.items()}

    @property
    def gamma(self):
        return self.steps[-1].gamma

    @property
    def gamma_signs(self):
        return self.steps[-1].gamma_signs

    @cached_property
    def forest(self) -> frozenset[tuple[int, int]]:
        edges = set(self.steps[0].forest)
        for step in self.steps[1:]:
            pushed = set()
            for a, b in edges:
                mid = step.vertex_of[(a, b)]
                for x in (a, b):
                    pushed.add(tuple(sorted((step.vertex_of[(x,)], mid))))
            edges = pushed | set(step.forest)
        return frozenset(edges)

    def distinguished_simplex(self, sigma: Simplex) -> Simplex:
        """The |sigma|-simplex inside sigma that r stretches onto sigma."""
        carrier = self.subdivision.carrier
        cand = [s for s in self.I_partition[sigma] if len(s) == len(sigma) and carrier[s] == sigma]
        if len(cand) != 1:
            raise AssertionError(f"expected one distinguished simplex over {sigma}, got {len(cand)}")
        return cand[0]

    def to_json(self) -> dict:
        S = self.subdivision
        names = _vertex_names(S)
        return {
            "base": self.base.to_json(),
            "levels": S.level,
            "policy": self.policy,
            "r_vertex_map": [[names[w], v] for w, v in sorted(self.r_vertex_map.items())],
        }


def _vertex_names(S: SubdividedComplex) -> dict[int, object]:
    """Nested barycentre tuples naming each vertex down to base vertex ids."""
    if S.parent is None:
        return {w: list(s) for w, s in S.barycentre.items()}
    up = _vertex_names(S.parent)
    return {w: [up[v] for v in s] for w, s in S.barycentre.items()}


def choose_r(S: SubdividedComplex, policy: str = MIN_VERTEX, epsilon_sq: Fraction | None = None) -> SubdivisionData:
    """Build per-level vertex choices and the composite approximation data.

    With ``epsilon_sq`` the boundary-retracting policy first checks that
    ``epsilon < comesh - 2 mesh(S)`` (measured in the base); otherwise the
    distinguished simplices cannot be kept clear of the boundary.
    """
    if policy not in POLICIES:
        raise ParameterError(f"unknown policy {policy!r}")
    if epsilon_sq is not None:
        check_retraction_feasible(S, Fraction(epsilon_sq))
    steps = tuple(LevelStep(sub, _priority_order(sub, policy)) for sub in S.chain())
    return SubdivisionData(S, steps, policy)


def check_retraction_feasible(S: SubdividedComplex, epsilon_sq: Fraction) -> None:
    n = S.base.dim
    if n < 1:
        raise SqueezeInfeasibleError("squeezing needs a positive-dimensional base")
    comesh_sq = Fraction(1, n * (n + 1))
    mesh_sq = subdivision_mesh_sq(S)
    # eps < c - 2m  <=>  c > 2m  and  eps^2 < c^2 - 4cm + 4m^2 with cm irrational;
    # compare  (c + 4m - eps)^2  vs  16 c m  after rearranging c - 2m - eps > 0
    if not _sqrt_less(epsilon_sq, comesh_sq, mesh_sq):
        raise SqueezeInfeasibleError(
            f"comesh - 2*mesh(Sd^{S.level}) does not exceed epsilon; subdivide further"
        )


def _sqrt_less(e2: Fraction, c2: Fraction, m2: Fraction) -> bool:
    """Exact test of sqrt(e2) + 2*sqrt(m2) < sqrt(c2)."""
    # both sides nonnegative; square: e2 + 4 m2 + 4 sqrt(e2 m2) < c2
    lhs_rational = e2 + 4 * m2
    if lhs_rational >= c2:
        return False
    # 4 sqrt(e2 m2) < c2 - lhs_rational, both sides nonnegative
    return 16 * e2 * m2 < (c2 - lhs_rational) ** 2


def dump_complex(X: SimplicialComplex) -> str:
    return json.dumps(X.to_json(), sort_keys=True)
