"""The algebraic subdivision functor and its reassembly equivalence.

Everything is first built per level, as operators that cross bases (C over
the parent complex, Sd C over the child).  Iterated data are composites of
the per-level pieces.  Presentations over the base complex (R_r) are only
regroupings of those fine operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from . import intmat
from .chain_algebra import (
    COSTAR,
    FULL,
    STAR,
    BlockOp,
    ContractibilityWitness,
    EquivalenceCertificate,
    GradedChainComplex,
    GradedChainMap,
    GradedHomotopy,
    Regrouping,
    dual,
    dual_op,
    is_contractible,
    mapping_cone,
    regroup_op,
    simplicial_chain_complex,
    split_cone_homotopy,
    ungroup_op,
)
from .errors import (
    BaseMismatchError,
    ContractionFailedError,
    SqueezeBoundExceededError,
    SupportViolationError,
    UnsupportedVariantError,
)
from .control_metrics import package_bound
from .simplicial_core import LevelStep, Simplex, SubdivisionData


def _check_costar_over(C: GradedChainComplex, step: LevelStep) -> None:
    if C.variant != COSTAR:
        raise UnsupportedVariantError(f"expected a costar complex, got {C.variant}")
    if C.space != step.parent:
        raise BaseMismatchError("complex is not graded over the subdivided complex's parent")


def _by_source(blocks: Mapping) -> dict[Simplex, list]:
    out: dict[Simplex, list] = {}
    for (t, s, n), m in blocks.items():
        out.setdefault(s, []).append((t, n, m))
    return out


# ---------------------------------------------------------------- one level


def sd_level(C: GradedChainComplex, step: LevelStep) -> GradedChainComplex:
    """Sd_r C for one subdivision level, costar variant.

    The summand over a child simplex s in I_sigma with offset m is
    C(sigma) shifted up by m.  Blocks copy d_{tau,sigma} onto
    s ∩ r^{-1}(tau) (case 1), and link s to its codimension-one faces
    inside I_sigma by signed identities (case 2).
    """
    _check_costar_over(C, step)
    ranks = {}
    for s in step.child.simplices:
        sigma = step.image[s]
        m = step.offset(s)
        for n in C.degrees(sigma):
            ranks[(s, n + m)] = C.rank(sigma, n)
    diff = {}
    out_of = _by_source(C.diff)
    for s in step.child.simplices:
        sigma = step.image[s]
        if not C.degrees(sigma):
            continue
        m = step.offset(s)
        for tau, k, blk in out_of.get(sigma, ()):
            t = step.restrict_preimage(s, tau)
            if t is not None:
                diff[(t, s, k + m)] = blk
        if m == 0:
            continue
        fib = step.fibres(s)
        for u in s:
            if len(fib[step.r[u]]) < 2:
                continue
            t = tuple(w for w in s if w != u)
            sign = (-1) ** (len(sigma) - 1) * step.o_incidence(t, s)
            for k in C.degrees(sigma):
                n = k + m
                diff[(t, s, n)] = intmat.eye(C.rank(sigma, k)) * ((-1) ** n * sign)
    return GradedChainComplex(step.sub, COSTAR, ranks, diff)


def sd_level_op(f: BlockOp, step: LevelStep, source: GradedChainComplex, target: GradedChainComplex) -> BlockOp:
    """Sd of a block operator: case-1 copies only."""
    out = {}
    for s in step.child.simplices:
        sigma = step.image[s]
        m = step.offset(s)
        for (tau, sig, k), blk in _blocks_from(f, sigma):
            t = step.restrict_preimage(s, tau)
            if t is not None:
                out[(t, s, k + m)] = blk
    return f._new(source, target, f.degree, out)


def _blocks_from(f: BlockOp, sigma: Simplex):
    cache = f.__dict__.setdefault("_src_cache", None)
    if cache is None:
        cache = {}
        for (t, s, n), m in f.blocks.items():
            cache.setdefault(s, []).append(((t, s, n), m))
        f.__dict__["_src_cache"] = cache
    return cache.get(sigma, ())


def _chain_composites(C: GradedChainComplex, sigma: Simplex) -> list[tuple[tuple[Simplex, ...], dict[int, np.ndarray]]]:
    """All chains rho_0 < ... < rho_i = sigma with composite d_{rho_0 rho_1}...d_{rho_{i-1} sigma}.

    Composites are keyed by the source degree n (they land in degree n - i).
    """
    into = C.__dict__.get("_into_cache")
    if into is None:
        into = {}
        for (t, s, n), m in C.diff.items():
            if t != s:
                into.setdefault(s, []).append((t, n, m))
        C.__dict__["_into_cache"] = into
    out = []
    start = {n: intmat.eye(C.rank(sigma, n)) for n in C.degrees(sigma)}

    def walk(chain, comp):
        out.append((chain, comp))
        head = chain[0]
        for t, k, m in into.get(head, ()):
            i = len(chain) - 1
            nxt = {}
            for n, a in comp.items():
                if n - i == k:
                    p = m @ a
                    if not intmat.is_zero(p):
                        nxt[n] = p
            if nxt:
                walk((t,) + chain, nxt)

    walk((sigma,), start)
    return out


def s_level(C: GradedChainComplex, SdC: GradedChainComplex, step: LevelStep) -> GradedChainMap:
    """s_*: C -> Sd C for one level (operator across the two bases)."""
    acc: dict = {}
    for sigma in C.support:
        for chain, comp in _chain_composites(C, sigma):
            i = len(chain) - 1
            pieces = step.gamma_pieces(chain[0], chain)
            for piece, omega in pieces:
                for n, mat in comp.items():
                    if not SdC.rank(piece, n):
                        continue
                    blk = mat * (omega * (-1) ** ((n + 1) * i))
                    k = (piece, sigma, n)
                    acc[k] = acc[k] + blk if k in acc else blk
    return GradedChainMap(C, SdC, acc)


def r_level(C: GradedChainComplex, SdC: GradedChainComplex, step: LevelStep) -> GradedChainMap:
    """r_*: Sd C -> C, the identity out of the offset-0 piece of each I_tau."""
    blocks = {}
    for s in step.child.simplices:
        if step.offset(s) == 0:
            tau = step.image[s]
            for n in C.degrees(tau):
                blocks[(tau, s, n)] = intmat.eye(C.rank(tau, n))
    return GradedChainMap(SdC, C, blocks)


def i_regrouping(SdC: GradedChainComplex, base, image) -> Regrouping:
    return Regrouping(SdC, base, image, SdC.variant)


def p_level(C: GradedChainComplex, SdC: GradedChainComplex, step: LevelStep, s: GradedChainMap, r: GradedChainMap) -> GradedHomotopy:
    """P with dP + Pd = 1 - s r on Sd C, from a contraction of cone(s)."""
    base = step.sub.parent if step.sub.parent is not None else step.sub.base
    R = i_regrouping(SdC, base, step.image.__getitem__)
    sR = regroup_op(s, None, R)
    cone = mapping_cone(sR)
    res = is_contractible(cone)
    if isinstance(res, ContractibilityWitness):
        raise ContractionFailedError(f"cone of s_* is not contractible at {res.simplex}")
    _g, _gc, gd = split_cone_homotopy(sR, res.homotopy)
    fine = ungroup_op(gd, R, R)
    P = fine - s @ (r @ fine)
    return GradedHomotopy(SdC, SdC, P.blocks)


# ---------------------------------------------------------------- towers


class SubdividedChainComplex:
    """Sd_r^i C with the reassembly equivalence data.

    ``levels[k]`` is the complex after k subdivisions (``levels[0]`` is C).
    Star complexes are handled through the duality functor: Sd C is the dual
    of Sd of the dual costar complex, and s, r, P are transposes of r, s, P
    there.
    """

    def __init__(self, C: GradedChainComplex, r: SubdivisionData):
        if C.variant == FULL:
            raise UnsupportedVariantError("Sd is defined for costar and star complexes only")
        if C.space != r.base:
            raise BaseMismatchError("complex and subdivision data have different bases")
        self.source = C
        self.data = r
        self.star = C.variant == STAR
        self._costar_source = dual(C) if self.star else C
        levels = [self._costar_source]
        for step in r.steps:
            levels.append(sd_level(levels[-1], step))
        self._costar_levels = levels
        self.underlying = dual(levels[-1]) if self.star else levels[-1]

    @property
    def provenance(self) -> tuple[GradedChainComplex, SubdivisionData]:
        return self.source, self.data

    # costar pieces, per level
    @cached_property
    def _s_levels(self) -> list[GradedChainMap]:
        L = self._costar_levels
        return [s_level(L[k], L[k + 1], st) for k, st in enumerate(self.data.steps)]

    @cached_property
    def _r_levels(self) -> list[GradedChainMap]:
        L = self._costar_levels
        return [r_level(L[k], L[k + 1], st) for k, st in enumerate(self.data.steps)]

    @cached_property
    def _p_levels(self) -> list[GradedHomotopy]:
        L = self._costar_levels
        return [p_level(L[k], L[k + 1], st, s, r)
                for k, (st, s, r) in enumerate(zip(self.data.steps, self._s_levels, self._r_levels))]

    @cached_property
    def _costar_fine(self) -> tuple[GradedChainMap, GradedChainMap, GradedHomotopy]:
        s, r, P = self._s_levels[0], self._r_levels[0], self._p_levels[0]
        for s2, r2, P2 in zip(self._s_levels[1:], self._r_levels[1:], self._p_levels[1:]):
            P = P2 + s2 @ (P @ r2)
            s = s2 @ s
            r = r @ r2
        return s, r, P

    @cached_property
    def fine(self) -> tuple[GradedChainMap, GradedChainMap, GradedHomotopy]:
        """(s, r, P) as operators between C and the unassembled Sd C."""
        s, r, P = self._costar_fine
        if not self.star:
            return s, r, P
        C, SdC = self.source, self.underlying
        s_ = dual_op(r, source_dual=C, target_dual=SdC)
        r_ = dual_op(s, source_dual=SdC, target_dual=C)
        P_ = dual_op(P, source_dual=SdC, target_dual=SdC)
        return s_, r_, P_

    def fine_s(self):
        return self.fine[0]

    def fine_r(self):
        return self.fine[1]

    def fine_p(self):
        return self.fine[2]

    @cached_property
    def regrouping(self) -> Regrouping:
        return i_regrouping(self.underlying, self.data.base, self.data.image)

    def sd_op(self, f: BlockOp, target: "SubdividedChainComplex") -> BlockOp:
        """Sd^i of an operator from this complex's source to ``target``'s source."""
        if self.star:
            fv = dual_op(f, source_dual=target._costar_source, target_dual=self._costar_source)
            out = target._sd_costar_op(fv, self)
            return dual_op(out, source_dual=self.underlying, target_dual=target.underlying)
        return self._sd_costar_op(f, target)

    def _sd_costar_op(self, f: BlockOp, target: "SubdividedChainComplex") -> BlockOp:
        src_levels, tgt_levels = self._costar_levels, target._costar_levels
        cur = f
        for k, step in enumerate(self.data.steps):
            cur = sd_level_op(cur, step, src_levels[k + 1], tgt_levels[k + 1])
        return cur


def _tower(C: GradedChainComplex, r: SubdivisionData) -> SubdividedChainComplex:
    return SubdividedChainComplex(C, r)


def sd_complex(C: GradedChainComplex, r: SubdivisionData) -> SubdividedChainComplex:
    return _tower(C, r)


def sd_map(f: GradedChainMap, r: SubdivisionData, source: SubdividedChainComplex | None = None,
           target: SubdividedChainComplex | None = None) -> GradedChainMap:
    src = source if source is not None else _tower(f.source, r)
    tgt = target if target is not None else _tower(f.target, r)
    return src.sd_op(f, tgt)


def assemble_R_I(SdC: SubdividedChainComplex) -> GradedChainComplex:
    """R_r(Sd C)(sigma) = the sum of Sd C over I_sigma."""
    return SdC.regrouping.complex


def s_star(C: GradedChainComplex, r: SubdivisionData, SdC: SubdividedChainComplex | None = None) -> GradedChainMap:
    T = SdC if SdC is not None else _tower(C, r)
    return regroup_op(T.fine_s(), None, T.regrouping)


def r_star(C: GradedChainComplex, r: SubdivisionData, SdC: SubdividedChainComplex | None = None) -> GradedChainMap:
    T = SdC if SdC is not None else _tower(C, r)
    return regroup_op(T.fine_r(), T.regrouping, None)


def p_star(C: GradedChainComplex, r: SubdivisionData, SdC: SubdividedChainComplex | None = None) -> GradedHomotopy:
    T = SdC if SdC is not None else _tower(C, r)
    return regroup_op(T.fine_p(), T.regrouping, T.regrouping)


def reassembly_holds(SdC: SubdividedChainComplex) -> bool:
    """r s = 1 and dP + Pd = 1 - s r, checked on the fine operators."""
    s, r, P = SdC.fine
    one_c = SdC.source.identity()
    one_sd = SdC.underlying.identity()
    return (r @ s) == one_c and P.boundary() == one_sd - s @ r


def sd_commutes_with_cone(f: GradedChainMap, r: SubdivisionData) -> bool:
    lhs = _tower(mapping_cone(f), r).underlying
    sf = sd_map(f, r)
    rhs = mapping_cone(sf)
    return lhs == rhs


def sd_simplicial_iso(X, r: SubdivisionData) -> GradedChainMap:
    """Sd_r Δ_*(X) -> Δ_*(Sd^i X): diagonal signs (-1)^{m + floor(m/2)} o(s).

    Iterated levels compose the level isomorphism with Sd of the previous one.
    """
    C = simplicial_chain_complex(X)
    T = _tower(C, r)
    phi = None
    prev_target = C
    for k, step in enumerate(r.steps):
        here = T._costar_levels[k + 1]
        if phi is not None:
            # Sd of the previous isomorphism lands in Sd(Δ_*(Sd^{k}X)) at this level
            mid = sd_level(prev_target, step)
            phi_sd = sd_level_op(phi, step, here, mid)
        else:
            mid = here
            phi_sd = None
        target = simplicial_chain_complex(step.sub)
        blocks = {}
        for s in step.child.simplices:
            m = step.offset(s)
            blocks[(s, s, len(s) - 1)] = intmat.as_int_matrix([[(-1) ** (m + m // 2) * step.o_sign(s)]])
        level_iso = GradedChainMap(mid, target, blocks)
        phi = level_iso if phi_sd is None else level_iso @ phi_sd
        prev_target = target
    return phi


# ---------------------------------------------------------------- squeeze


@dataclass
class SqueezeResult:
    map: GradedChainMap
    certificate: EquivalenceCertificate | None
    bound: float


def squeeze(cert: EquivalenceCertificate, SdC: SubdividedChainComplex, SdD: SubdividedChainComplex,
            epsilon_sq) -> SqueezeResult:
    """Turn a small equivalence Sd^i C -> Sd^i D into a triangular one C -> D.

    ``cert`` is graded over Sd^i X in the full variant.  The output is
    r_* f s_* (for star complexes the same formula with the dual s and r).
    """
    bound = package_bound(cert.ops(), SdC.data.subdivision)
    if not bound.below(epsilon_sq):
        raise SqueezeBoundExceededError(bound.value, math.sqrt(epsilon_sq))
    sC, rC, PC = SdC.fine
    sD, rD, PD = SdD.fine
    f, g = cert.f, cert.g
    out = rD @ (f @ sC)
    variant = SdC.source.variant
    bad = out.violations(variant)
    if bad:
        raise SupportViolationError(bad[0])
    C, D = SdC.source, SdD.source
    f2 = GradedChainMap(C, D, out.blocks)
    g2 = GradedChainMap(D, C, (rC @ (g @ sD)).blocks)
    gc = GradedHomotopy(C, C, (rC @ ((cert.gamma_C + g @ (PD @ f)) @ sC)).blocks)
    gd = GradedHomotopy(D, D, (rD @ ((cert.gamma_D + f @ (PC @ g)) @ sD)).blocks)
    for op in (g2, gc, gd):
        bad = op.violations(variant)
        if bad:
            raise SupportViolationError(bad[0], "certificate block violates variant triangularity")
    return SqueezeResult(f2, EquivalenceCertificate(f2, g2, gc, gd), bound.value)
