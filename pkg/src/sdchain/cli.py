"""Command-line front end.  Every verb prints (or writes) one JSON report.

Exit status: 0 when the verdict is true, 1 when it is false (a witness is
attached), 2 when the input is malformed.
"""
from __future__ import annotations

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import click

from . import chain_algebra as ca
from . import control_metrics as cm
from . import duality, generators, map_analysis, subdivision
from .errors import SdchainError, SqueezeBoundExceededError, SqueezeInfeasibleError
from .simplicial_core import (
    BOUNDARY_RETRACTING,
    MIN_VERTEX,
    POLICIES,
    SimplicialComplex,
    choose_r,
    iterated_subdivision,
)


class InputError(click.ClickException):
    exit_code = 2


# ---------------------------------------------------------------- input resolution


def _load_json(path: str):
    p = Path(path)
    if not p.exists():
        raise InputError(f"{path}: no such file")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _complex(spec: str) -> SimplicialComplex:
    """A file path, or ``named:<name>`` for a built-in complex."""
    if spec.startswith("named:"):
        name = spec[len("named:"):]
        if name not in generators.NAMED:
            raise InputError(f"unknown complex {name!r}; known: {', '.join(sorted(generators.NAMED))}")
        return generators.named_complex(name)
    data = _load_json(spec)
    try:
        return SimplicialComplex.from_json(data)
    except SdchainError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _graded(spec: str, seed: int) -> ca.GradedChainComplex:
    """A file path, or ``random[-contractible][-star]:<base>`` drawn from the seed."""
    head, _, base = spec.partition(":")
    if base and head.startswith("random"):
        flags = head.split("-")[1:]
        if set(flags) - {"contractible", "star"}:
            raise InputError(f"unknown generator {head!r}")
        if base not in generators.NAMED:
            raise InputError(f"unknown base {base!r}")
        rng = random.Random(seed)
        variant = ca.STAR if "star" in flags else ca.COSTAR
        return generators.random_complex(generators.named_complex(base), rng, variant, contractible="contractible" in flags)
    if head == "simplicial" and base:
        return ca.simplicial_chain_complex(_complex(f"named:{base}"))
    data = _load_json(spec)
    try:
        return ca.GradedChainComplex.from_json(data)
    except SdchainError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _map(spec: str) -> map_analysis.SimplicialMap:
    if spec.startswith("named:"):
        name = spec[len("named:"):]
        if name not in generators.NAMED_MAPS:
            raise InputError(f"unknown map {name!r}; known: {', '.join(sorted(generators.NAMED_MAPS))}")
        return generators.named_map(name)
    data = _load_json(spec)
    try:
        return map_analysis.SimplicialMap.from_json(data)
    except SdchainError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------- output


class Report:
    def __init__(self, ctx: click.Context):
        self.ctx = ctx
        self.started = time.perf_counter()
        self.timings: dict[str, float] = {}

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.timings[name] = round(now - self.started, 6)

    def emit(self, verdict: bool, data: dict, certificate=None, witness=None) -> None:
        obj = self.ctx.obj
        envelope = {
            "command": self.ctx.info_name,
            "verdict": bool(verdict),
            "certificate": certificate,
            "witness": witness,
            "timings": self.timings if obj["timings"] else {},
            "data": data,
        }
        text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
        if obj["out"]:
            Path(obj["out"]).write_text(text)
        else:
            click.echo(text, nl=False)
        self.ctx.exit(0 if verdict else 1)


def _subdivision_data(X: SimplicialComplex, levels: int, policy: str):
    return choose_r(iterated_subdivision(X, levels), policy)


# ---------------------------------------------------------------- commands


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except SdchainError as exc:
            raise InputError(str(exc)) from exc


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for random:<base> inputs and fixtures.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here instead of stdout.")
@click.option("--timings/--no-timings", default=False, help="Include wall-clock timings (breaks byte-identity).")
@click.pass_context
def main(ctx, seed, out, timings):
    """Chain complexes over simplicial complexes: subdivision, squeezing, duality and maps."""
    ctx.obj = {"seed": seed, "out": out, "timings": timings}


levels_opt = click.option("--levels", type=click.IntRange(min=1), default=1, show_default=True)
policy_opt = click.option("--policy", type=click.Choice(POLICIES), default=MIN_VERTEX, show_default=True)


@main.command()
@click.argument("complex_spec")
@click.pass_context
def build(ctx, complex_spec):
    """Parse and normalise a simplicial complex."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    data = {
        "complex": X.to_json(),
        "dimension": X.dim,
        "f_vector": [len(X.of_dim(k)) for k in range(X.dim + 1)],
        "pure": X.is_pure(),
    }
    rep.lap("build")
    rep.emit(True, data)


@main.command()
@click.argument("complex_spec")
@levels_opt
@policy_opt
@click.pass_context
def subdivide(ctx, complex_spec, levels, policy):
    """Iterated barycentric subdivision with its approximation data r."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    r = _subdivision_data(X, levels, policy)
    K = r.subdivision.complex
    data = {
        "subdivision": r.to_json(),
        "complex": K.to_json(),
        "f_vector": [len(K.of_dim(k)) for k in range(K.dim + 1)],
        "distinguished": [[list(s), list(r.distinguished_simplex(s))] for s in X.simplices],
    }
    rep.lap("subdivide")
    rep.emit(True, data)


@main.command()
@click.argument("complex_spec")
@click.option("--levels", type=click.IntRange(min=0), default=1, show_default=True)
@click.pass_context
def mesh(ctx, complex_spec, levels):
    """Mesh and comesh of X and its subdivisions, with the decay check."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    per_level = []
    for k in range(levels + 1):
        entry = {"level": k, **cm.metric_report(X, k).to_json()}
        if k >= 1 and X.dim >= 1:
            entry["strict_decay"] = cm.verify_mesh_decay(X, k)
        per_level.append(entry)
    rep.lap("mesh")
    rep.emit(True, {"levels": per_level})


@main.command("squeeze-params")
@click.argument("complex_spec")
@click.option("--alpha", default="1/2", show_default=True)
@click.option("--max-level", type=click.IntRange(min=1), default=4, show_default=True)
@click.pass_context
def squeeze_params_cmd(ctx, complex_spec, alpha, max_level):
    """epsilon(X) and i(X), plus the least level whose actual mesh is small enough."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    try:
        p = cm.squeeze_params(X, _fraction(alpha))
    except SdchainError as exc:
        raise InputError(str(exc)) from exc
    holds = cm.squeeze_chain_holds(X, p)
    data = {"params": p.to_json(), "inequality_holds": holds,
            "minimal_feasible_level": cm.minimal_feasible_level(X, p.alpha, max_level)}
    rep.lap("squeeze-params")
    rep.emit(holds, data)


@main.command()
@click.argument("graded_spec")
@click.pass_context
def verify(ctx, graded_spec):
    """d^2 = 0 and variant triangularity of a graded complex."""
    rep = Report(ctx)
    C = _graded(graded_spec, ctx.obj["seed"])
    ok = ca.verify(C)
    witness = None
    if not ok:
        witness = {"violations": [[list(t), list(s), n] for t, s, n in C.d.violations(C.variant)],
                   "d_squared_blocks": len((C.d @ C.d).blocks)}
    rep.lap("verify")
    rep.emit(ok, {"complex": C.to_json()}, witness=witness)


def _contractibility(C: ca.GradedChainComplex):
    if C.variant == ca.FULL:
        res = duality.controlled_contraction(C)
        if isinstance(res, ca.HomologyWitness):
            return False, None, {"homology": res.group.to_json()}
        return res.verified, res.to_json(), None
    res = ca.is_contractible(C)
    if isinstance(res, ca.ContractibilityWitness):
        return False, None, res.to_json()
    return res.verified, res.to_json(), None


@main.command("check-contractible")
@click.argument("graded_spec")
@click.pass_context
def check_contractible(ctx, graded_spec):
    """Decide contractibility; certificate is an explicit homotopy."""
    rep = Report(ctx)
    C = _graded(graded_spec, ctx.obj["seed"])
    ok, cert, witness = _contractibility(C)
    rep.lap("check-contractible")
    rep.emit(ok, {"variant": C.variant}, certificate=cert, witness=witness)


@main.command()
@click.argument("graded_spec")
@click.option("--locals", "locals_file", default=None, help="JSON list of [simplex, degree, matrix] local homotopies.")
@click.pass_context
def contract(ctx, graded_spec, locals_file):
    """Globalize local contractions into a triangular one."""
    rep = Report(ctx)
    C = _graded(graded_spec, ctx.obj["seed"])
    if C.variant == ca.FULL:
        raise InputError("the local-to-global formula needs a costar or star complex")
    if locals_file:
        raw = _load_json(locals_file)
        try:
            locs: dict = {}
            for s, n, m in raw:
                rows = len(m)
                locs.setdefault(tuple(s), {})[int(n)] = ca.intmat.as_int_matrix(m, rows, len(m[0]) if rows else 0)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{locals_file}: malformed local homotopy list: {exc}") from exc
    else:
        locs = {}
        for s in C.support:
            res = ca.local_contract(C.local(s))
            if isinstance(res, ca.HomologyWitness):
                rep.emit(False, {}, witness={"simplex": list(s), "homology": res.group.to_json()})
            locs[s] = res.homotopy
    try:
        cert = ca.globalize_contraction(C, locs)
    except ca.InvalidLocalContractionError as exc:
        rep.emit(False, {}, witness={"simplex": list(exc.simplex), "reason": str(exc)})
    rep.lap("contract")
    rep.emit(cert.verified, {"triangular": cert.homotopy.respects(C.variant)}, certificate=cert.to_json())


@main.command("sd-chain")
@click.argument("graded_spec", required=False)
@click.option("--complex", "complex_opt", default=None, help="Graded complex (alternative to the positional argument).")
@levels_opt
@policy_opt
@click.option("--emit", type=click.Path(dir_okay=False), default=None, help="Also write Sd_r^i C alone to this file.")
@click.pass_context
def sd_chain(ctx, graded_spec, complex_opt, levels, policy, emit):
    """Sd_r^i C with a bit-exact check of r s = 1 and dP + Pd = 1 - s r."""
    rep = Report(ctx)
    spec = complex_opt or graded_spec
    if spec is None:
        raise InputError("give a graded complex file or random:<base>")
    C = _graded(spec, ctx.obj["seed"])
    r = _subdivision_data(C.space, levels, policy)
    T = subdivision.sd_complex(C, r)
    holds = subdivision.reassembly_holds(T)
    rep.lap("sd-chain")
    if emit:
        Path(emit).write_text(json.dumps(T.underlying.to_json(), indent=2, sort_keys=True) + "\n")
    data = {"source": C.to_json(), "subdivided": T.underlying.to_json(), "levels": levels, "policy": policy}
    rep.emit(holds, data, certificate={"reassembly": holds})


@main.command()
@click.argument("graded_spec")
@levels_opt
@policy_opt
@click.pass_context
def assemble(ctx, graded_spec, levels, policy):
    """R_r Sd_r C over the base with the assembled s_*, r_*, P_*."""
    rep = Report(ctx)
    C = _graded(graded_spec, ctx.obj["seed"])
    r = _subdivision_data(C.space, levels, policy)
    T = subdivision.sd_complex(C, r)
    R = subdivision.assemble_R_I(T)
    s = subdivision.s_star(C, r, T)
    rr = subdivision.r_star(C, r, T)
    P = subdivision.p_star(C, r, T)
    ok = (rr @ s) == C.identity() and P.boundary() == R.identity() - s @ rr
    rep.lap("assemble")
    data = {"assembled": R.to_json(), "s": s.to_json(), "r": rr.to_json(), "P": P.to_json(),
            "triangular": all(op.respects(C.variant) for op in (s, rr, P))}
    rep.emit(ok, data, certificate={"equivalence": ok})


@main.command()
@click.argument("complex_spec")
@click.option("--graded", "graded_spec", default=None, help="Complex C over the base; simplicial chains by default.")
@levels_opt
@click.option("--alpha", default="1/2", show_default=True)
@click.option("--far/--near", default=False, help="Perturb between far-apart simplices to exercise the bound check.")
@click.pass_context
def squeeze(ctx, complex_spec, graded_spec, levels, alpha, far):
    """Squeeze a seeded small full-variant equivalence on Sd^i C back to a triangular one."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    eps_sq = _fraction(alpha) ** 2 * cm.standard_rad_sq(X.dim)
    C = _graded(graded_spec, ctx.obj["seed"]) if graded_spec else ca.simplicial_chain_complex(X)
    if C.space != X:
        raise InputError("the graded complex lives over a different base")
    try:
        r = choose_r(iterated_subdivision(X, levels), BOUNDARY_RETRACTING, eps_sq)
    except SqueezeInfeasibleError as exc:
        rep.emit(False, {}, witness={"reason": str(exc)})
    T = subdivision.sd_complex(C, r)
    rng = random.Random(ctx.obj["seed"])
    cert = generators.perturbation_equivalence(T.underlying, rng, far=far)
    bound = cm.package_bound(cert.ops(), r.subdivision)
    base = {"epsilon_sq": str(eps_sq), "bound": bound.value, "levels": levels}
    rep.lap("fixture")
    try:
        res = subdivision.squeeze(cert, T, T, eps_sq)
    except SqueezeBoundExceededError as exc:
        rep.emit(False, base, witness={"bound": exc.bound, "epsilon": exc.epsilon})
    rep.lap("squeeze")
    cone = ca.is_contractible(ca.mapping_cone(res.map))
    ok = not isinstance(cone, ca.ContractibilityWitness) and res.certificate.check()
    rep.lap("cone")
    data = {**base, "map": res.map.to_json(), "triangular": res.map.respects(C.variant)}
    rep.emit(ok, data, certificate={"cone_contractible": not isinstance(cone, ca.ContractibilityWitness),
                                    "equivalence_verified": res.certificate.check()})


@main.command("check-pd")
@click.argument("complex_spec")
@click.pass_context
def check_pd(ctx, complex_spec):
    """Is [X] ∩ - a chain equivalence?"""
    rep = Report(ctx)
    X = _complex(complex_spec)
    res = duality.pd_check(X)
    rep.lap("check-pd")
    cert = res.certificate.to_json() if res.certificate is not None else None
    rep.emit(res.is_pd_space, {"fundamental_class": res.fundamental_class.to_json()}, certificate=cert, witness=res.witness)


@main.command("controlled-pd")
@click.argument("complex_spec")
@click.option("--levels", type=click.IntRange(min=0), default=1, show_default=True)
@click.pass_context
def controlled_pd(ctx, complex_spec, levels):
    """Control of the duality package at subdivision levels 0..i, measured in X."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    pd = duality.pd_check(X)
    if not pd:
        rep.emit(False, {}, witness=pd.witness)
    bounds = []
    for k in range(levels + 1):
        bounds.append({"level": k, "bound": duality.controlled_pd_bound(X, k)})
        rep.lap(f"level-{k}")
    decreasing = all(b["bound"] <= a["bound"] for a, b in zip(bounds, bounds[1:]))
    rep.emit(True, {"bounds": bounds, "non_increasing": decreasing})


@main.command("check-homology-manifold")
@click.argument("complex_spec")
@click.pass_context
def check_homology_manifold(ctx, complex_spec):
    """Link criterion: every lk(σ) has the homology of the right sphere."""
    rep = Report(ctx)
    X = _complex(complex_spec)
    res = duality.is_homology_manifold(X)
    rep.lap("check-homology-manifold")
    witness = None
    if not res:
        witness = {"reason": res.reason, "links": [dg.to_json() for dg in res.failures]}
    rep.emit(res.is_homology_manifold, {"simplices_checked": len(res.diagnostics)}, witness=witness)


@main.command("analyze-map")
@click.argument("map_spec", required=False)
@click.option("--map", "map_opt", default=None, help="Map file (alternative to the positional argument).")
@click.option("--report", "detail", type=click.Choice(["summary", "full"]), default="summary", show_default=True)
@click.pass_context
def analyze_map(ctx, map_spec, map_opt, detail):
    """Fibres, acyclicity, the induced chain map and the Vietoris verdict."""
    rep = Report(ctx)
    spec = map_opt or map_spec
    if spec is None:
        raise InputError("give a map file or named:<map>")
    f = _map(spec)
    if not map_analysis.validate(f):
        raise InputError(f"{spec}: vertex map is not simplicial")
    v = map_analysis.vietoris_verdict(f)
    rep.lap("analyze-map")
    data = {"vietoris": v.verdict, "routes_agree": v.routes_agree,
            "fibers": [fv.to_json() for fv in v.fibers]}
    if detail == "full":
        data["fiber_complexes"] = [map_analysis.fiber(f, s).to_json() for s in f.target.simplices]
        data["induced_chain_map"] = v.chain_map.to_json()
    cert = v.certificate.to_json() if v.certificate is not None else None
    witness = v.witness.to_json() if v.witness is not None else None
    rep.emit(v.verdict, data, certificate=cert, witness=witness)


if __name__ == "__main__":
    main()
