"""Declarative scenarios: parse, build, certify, check, report.

A scenario file names a model generator with its parameters, one
perturbation condition with ``lambda``, and a list of checks. Numeric
literals are decimal strings so that parsing is bit-stable. Every check
produces ``{name, kind, status, measured, bound, runtime_ms}`` with
``status == "pass"`` exactly when ``measured <= bound``; strict
inequalities use the largest double below the threshold as the bound.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import distribution as dist
from . import gallery
from .errors import QuasiFramesError, SchemaError
from .linalg import ComplexVector, HilbertGrid
from .perturbation import (
    DualSystem,
    PerturbationCertificate,
    build_duals_strong,
    build_duals_subspace,
    build_duals_weak,
    check_C25,
    check_C28,
    check_C210,
    check_L12,
    check_L13,
    excess_transport,
    random_tests,
    scan_lambda,
)
from .sequences import (
    SubspaceBasis,
    VectorFamily,
    biorthogonality_defect,
    frame_bounds,
    is_riesz,
    mixed_gram,
    partial_sum_trace,
    strong_residuals,
)

__all__ = [
    "load_schema",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "scan_scenario",
    "report_json",
    "report_csv",
    "exit_code",
    "MODELS",
    "CHECKS",
    "bundled_scenarios",
    "scan_csv",
]


# -- parsing -------------------------------------------------------------------


def load_schema() -> dict:
    return json.loads(resources.files("quasiframes").joinpath("schema.json").read_text())


def num(s) -> float:
    """Decimal string (or JSON integer) to float."""
    if isinstance(s, bool):
        raise SchemaError("booleans are not numbers")
    if isinstance(s, int):
        return float(s)
    if isinstance(s, str):
        try:
            return float(s)
        except ValueError as exc:
            raise SchemaError(f"not a decimal literal: {s!r}") from exc
    raise SchemaError(f"numeric values must be decimal strings, got {s!r}")


def parse_lambda(v) -> complex:
    if isinstance(v, list):
        lam = complex(num(v[0]), num(v[1]))
    else:
        lam = complex(num(v), 0.0)
    if lam == 0:
        raise SchemaError("lambda must be nonzero")
    return lam


def parse_function(spec: dict) -> dist.AnalyticFunction:
    reg = dist.function_registry()
    name = spec["name"]
    if name not in reg:
        raise SchemaError(f"unknown function {name!r}; known: {sorted(reg)}")
    params = {}
    for k, v in spec.get("params", {}).items():
        params[k] = [num(x) for x in v] if isinstance(v, list) else num(v)
    try:
        f = reg[name](**params)
    except TypeError as exc:
        raise SchemaError(f"bad parameters for function {name!r}: {exc}") from exc
    if spec.get("reciprocal", False):
        f = f.reciprocal()
    if "scale" in spec:
        f = f * num(spec["scale"])
    return f


def parse_scenario(data: dict) -> dict:
    """Validate against the schema and the registries; returns the raw dict."""
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"scenario does not match the schema: {exc.message}") from exc
    gen = data["model"]["generator"]
    if gen not in MODELS:
        raise SchemaError(f"unknown generator {gen!r}")
    model = MODELS[gen]
    unknown = set(data["model"].get("params", {})) - set(model.params)
    if unknown:
        raise SchemaError(f"unknown parameters for {gen!r}: {sorted(unknown)}")
    if data["space"]["kind"] not in model.spaces:
        raise SchemaError(f"generator {gen!r} needs space kind in {model.spaces}")
    cond = data.get("perturbation", {}).get("condition", "none")
    if cond not in CONDITIONS:
        raise SchemaError(f"unknown condition {cond!r}")
    if "lambda" in data.get("perturbation", {}):
        parse_lambda(data["perturbation"]["lambda"])
    for c in data.get("checks", []):
        if c["kind"] not in CHECKS:
            raise SchemaError(f"unknown check kind {c['kind']!r}")
    names = [c["name"] for c in data.get("checks", [])]
    if len(set(names)) != len(names):
        raise SchemaError("check names must be unique")
    return data


def load_scenario(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(data)


def bundled_scenarios() -> dict[str, Path]:
    root = resources.files("quasiframes").joinpath("scenarios")
    return {p.name[:-5]: Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")}


# -- models --------------------------------------------------------------------


@dataclass
class Context:
    """Everything a condition or a check may look at."""

    name: str
    space: HilbertGrid | None
    families: dict
    reference: dict = field(default_factory=dict)
    subspace: SubspaceBasis | None = None
    extra: dict = field(default_factory=dict)
    anchor: str = ""
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    cert: PerturbationCertificate | None = None
    dual: DualSystem | None = None

    def family(self, key: str) -> VectorFamily:
        if key not in self.families:
            raise SchemaError(f"scenario {self.name!r} has no family {key!r}")
        return self.families[key]

    def tol(self, key: str, default: float) -> float:
        return self.tolerances.get(key, default)


@dataclass(frozen=True)
class Model:
    build: Callable[[dict, dict, int], Context]
    params: dict
    spaces: tuple
    anchor: str


def _grid(space: dict) -> gallery.HermiteGrid:
    return gallery.HermiteGrid(int(space["M"]))


def _p(params: dict, key: str, default=None, kind: Callable = num):
    if key not in params:
        if default is None:
            raise SchemaError(f"missing parameter {key!r}")
        return default
    return kind(params[key])


def _build_rank_one(params, space, seed):
    a, b = _p(params, "a"), _p(params, "b")
    dim = int(space["dim"])
    sc = gallery.make_rank_one_abstract(dim, a, b, seed)
    fam = dict(sc.families)
    fam["xi"], fam["chi"] = sc["eta"], sc["chi"]
    return Context(sc.name, sc.space, fam, sc.reference, anchor=sc.anchor)


def _build_weighted_onb(params, space, seed):
    g = _grid(space)
    sc = gallery.make_weighted_onb(parse_function(params["rho1"]), parse_function(params["rho2"]), g, int(space["N"]))
    ref = dict(sc.reference)
    ref["Qbar"] = sc.reference["Q"]
    fam = dict(sc.families)
    fam["xi"] = fam["chi"] = sc["e"]
    return Context(sc.name, sc.space, fam, ref, anchor=sc.anchor, extra={"grid": g})


def _build_oscillator(params, space, seed):
    g = _grid(space)
    alpha = _p(params, "alpha")
    s = gallery.make_shifted_oscillator(alpha, int(space["N"]), g)
    a = _p(params, "a", alpha)
    b = _p(params, "b", -alpha)
    sc = gallery.make_rank_one(s.eta, s.chi, s.sigma, a, b)
    fam = dict(sc.families)
    fam["xi"] = sc["eta"]
    anchor = "H eta_n = E_n eta_n with E_n = n + 1/2 + alpha^2; phi_n = (I + a P_sigma) eta_n"
    return Context("shifted_oscillator", s.space, fam, sc.reference, anchor=anchor, extra={"oscillator": s})


def _build_christensen(params, space, seed):
    N = int(_p(params, "N", kind=int))
    if "dim" in space and int(space["dim"]) != N + 1:
        raise SchemaError(f"christensen with N={N} lives in dimension {N + 1}")
    sc = gallery.make_christensen(N, parse_lambda(params.get("lambda", "1")), _p(params, "eps"))
    fam = dict(sc.families)
    fam["psi"] = fam["chi"]
    return Context(sc.name, sc.space, fam, sc.reference, sc.subspace, anchor=sc.anchor)


def _build_counterexample(params, space, seed):
    K = int(_p(params, "K", kind=int))
    phi, tilde = gallery.make_counterexample(K)
    anchor = "sum <phi_n, f> phi~_n converges to f; the swapped series converges only if <e_1, f> = 0"
    return Context("counterexample", phi.space, {"phi": phi, "phi_tilde": tilde}, anchor=anchor, extra={"K": K})


def _build_lower_semiframe(params, space, seed):
    sc = gallery.make_lower_semiframe(int(_p(params, "N", kind=int)), _p(params, "growth"), _p(params, "shift", 0.0))
    fam = dict(sc.families)
    fam["psi"] = fam["chi"]
    return Context(sc.name, sc.space, fam, sc.reference, anchor=sc.anchor)


def _build_shift(params, space, seed):
    N = int(space["dim"])
    t = _p(params, "t")
    sp = HilbertGrid.unit(N)
    xi = np.eye(N, dtype=complex)
    phi = xi + t * np.roll(xi, 1, axis=0)
    fam = {"xi": VectorFamily(xi, sp, "xi"), "phi": VectorFamily(phi, sp, "phi"), "psi": VectorFamily(phi, sp, "psi")}
    fam["chi"] = fam["xi"]
    return Context("cyclic_shift", sp, fam, anchor="phi_n = xi_n + t xi_{n+1}; Bessel bound of the difference t^2 below A")


def _build_multiplier(params, space, seed):
    m, l = parse_function(params["m"]), parse_function(params["l"])
    sc = dist.make_multiplier_pair(m, l)
    f = parse_function(params.get("f", {"name": "gaussian"}))
    g = parse_function(params.get("g", {"name": "gaussian"}))
    anchor = "sum <f, phi_n><phi~_n, g> = <f, g> with phi_n = m Phi_n, phi~_n = m^{-1} eta_n, ||ml - 1|| < 1"
    return Context(
        "multiplier_distribution", None, {}, anchor=anchor, extra={"multiplier": sc, "f": f, "g": g, "m": m}
    )


MODELS: dict[str, Model] = {
    "rank_one": Model(_build_rank_one, {"a": "number", "b": "number"}, ("abstract",),
                      "Q = (1+b)I + (a-b)P_sigma, Q^{-1} = (I + (b-a)/(1+a) P_sigma)/(1+b)"),
    "weighted_onb": Model(_build_weighted_onb, {"rho1": "function", "rho2": "function"}, ("hermite-grid",),
                          "phi_n = rho1 c_n, psi_n = rho2 c_n; Q = multiplication by rho1 rho2"),
    "shifted_oscillator": Model(_build_oscillator, {"alpha": "number", "a": "number", "b": "number"},
                                ("hermite-grid",),
                                "eta_n = e_n exp(-sqrt2 alpha x), chi_n = e_n exp(sqrt2 alpha x), E_n = n + 1/2 + alpha^2"),
    "christensen": Model(_build_christensen, {"N": "integer", "lambda": "number", "eps": "number"}, ("abstract",),
                         "gamma_{n,k} = (eps/(n-k+1) + 1)/lambda, 0 <= eps < 3/(2 pi^2)"),
    "counterexample": Model(_build_counterexample, {"K": "integer"}, ("abstract",),
                            "groups {e_j, e_j, e_j} and {e_j, e_1, -e_1}: order of summation matters"),
    "lower_semiframe": Model(_build_lower_semiframe, {"N": "integer", "growth": "number", "shift": "number"},
                             ("abstract",), "xi_n = (1 + n growth) e_n lower semi-frame, chi_n = e_n/(1 + n growth)"),
    "cyclic_shift": Model(_build_shift, {"t": "number"}, ("abstract",),
                          "phi_n = xi_n + t xi_{n+1 mod N} around an orthonormal basis"),
    "multiplier_distribution": Model(_build_multiplier, {"m": "function", "l": "function", "f": "function",
                                                         "g": "function"}, ("distribution",),
                                     "phi_n = m x^n/sqrt(n!), psi_n = l eta_n, sup |m l - 1| < 1"),
}


# -- conditions ----------------------------------------------------------------


def _cond_strong(ctx, lam, p):
    D = ctx.subspace if p.get("restrict", True) else None
    tol = ctx.tol("construction", 1e-10)
    cert, dual = build_duals_strong(ctx.family("phi"), ctx.family("psi"), lam, D, tol=tol, seed=ctx.seed)
    return cert, dual


def _cond_weak(ctx, lam, p):
    return build_duals_weak(ctx.family("phi"), ctx.family("psi"), lam, tol=ctx.tol("construction", 1e-10), seed=ctx.seed)


def _cond_subspace(ctx, lam, p):
    sp = ctx.space
    D = ctx.subspace if ctx.subspace is not None else SubspaceBasis.full(sp)
    Qbar = ctx.reference.get("Qbar")
    if Qbar is None:
        raise SchemaError(f"scenario {ctx.name!r} supplies no extension for the subspace construction")
    return build_duals_subspace(ctx.family("phi"), ctx.family("psi"), lam, D, D, Qbar,
                                tol=ctx.tol("construction", 1e-10), seed=ctx.seed)


def _with_dual(cert):
    return cert, cert.dual


def _cond_C25(ctx, lam, p):
    return _with_dual(check_C25(ctx.family("xi"), ctx.family("chi"), ctx.family("phi"), ctx.family("psi"), lam,
                                ctx.subspace, tol=ctx.tol("construction", 1e-10), seed=ctx.seed))


def _cond_C28(variant):
    def run(ctx, lam, p):
        psi = ctx.family("chi") if variant == 2 else ctx.family("psi")
        return _with_dual(check_C28(ctx.family("xi"), ctx.family("chi"), ctx.family("phi"), psi, lam, variant,
                                    ctx.subspace, tol=ctx.tol("construction", 1e-10), seed=ctx.seed))

    return run


def _cond_L12(ctx, lam, p):
    return check_L12(ctx.family("xi"), ctx.family("phi"), lam), None


def _cond_L13(ctx, lam, p):
    return check_L13(ctx.family("xi"), ctx.family("psi"), lam), None


def _cond_C210(ctx, lam, p):
    return _with_dual(check_C210(ctx.family("xi"), ctx.family("chi"), ctx.family("psi"), lam,
                                 tol=ctx.tol("construction", 1e-10), seed=ctx.seed))


CONDITIONS: dict[str, Callable | None] = {
    "none": None,
    "T21_strong": _cond_strong,
    "T31_weak": _cond_weak,
    "T32_subspace": _cond_subspace,
    "C25_split": _cond_C25,
    "C28_bessel_1": _cond_C28(1),
    "C28_bessel_2": _cond_C28(2),
    "C28_norm_sum": _cond_C28(3),
    "L12_frame": _cond_L12,
    "L13_coeff": _cond_L13,
    "C210_coeff_dual": _cond_C210,
}


# -- checks --------------------------------------------------------------------


def _strict(x: float) -> float:
    return float(np.nextafter(x, -np.inf))


def _need_dual(ctx) -> DualSystem:
    if ctx.dual is None:
        raise QuasiFramesError("no dual system was constructed")
    return ctx.dual


def _need_cert(ctx) -> PerturbationCertificate:
    if ctx.cert is None:
        raise QuasiFramesError("no certificate was produced")
    return ctx.cert


def _tests(ctx, n):
    V = random_tests(ctx.space, n, ctx.seed)
    if ctx.subspace is not None and not ctx.subspace.is_full:
        V = ctx.subspace.projector().matrix @ V
    return V


def chk_verdict(ctx, p):
    return (0.0 if _need_cert(ctx).verdict else 1.0), 0.0


def chk_constant(ctx, p):
    cert = _need_cert(ctx)
    total = 0.0
    for key in p["key"].split("+"):
        v = cert.constants[key]
        total += max(v) if isinstance(v, list) else v
    return float(total), None


def chk_closed_form(ctx, p):
    dual = _need_dual(ctx)
    target = p["target"]
    ref = ctx.reference[target]
    got = {
        "Q": dual.Q_assembled,
        "Qinv": dual.Qinv,
        "phi_tilde": dual.phi_tilde,
        "psi_tilde": dual.psi_tilde,
    }[target]
    return float(np.max(np.abs(got.matrix - ref.matrix))), None


def chk_reconstruction(ctx, p):
    dual = _need_dual(ctx)
    V = _tests(ctx, int(p.get("tests", 100)))
    if p.get("side", "primal") == "primal":
        r = strong_residuals(ctx.family("phi"), dual.phi_tilde, V)
    else:
        r = strong_residuals(dual.psi_tilde, ctx.family("psi"), V)
    return max(r), None


def chk_log(ctx, p):
    return float(_need_dual(ctx).construction_log[p["key"]]), None


def chk_gram(ctx, p):
    dual = _need_dual(ctx)
    d = mixed_gram(ctx.family("phi"), dual.phi_tilde) - mixed_gram(dual.psi_tilde, ctx.family("psi"))
    return float(np.max(np.abs(d))), None


def chk_excess(ctx, p):
    a, b, c, d = excess_transport(ctx.family("phi"), ctx.family("psi"), _need_dual(ctx))
    return float(abs(a - b) + abs(c - d)), 0.0


def chk_predicted(ctx, p):
    cert = _need_cert(ctx)
    if cert.predicted_bounds is None:
        raise QuasiFramesError("certificate carries no predicted bounds")
    fb = frame_bounds(ctx.family(p.get("family", "phi")))
    pb = cert.predicted_bounds
    slack = num(p.get("slack", "1e-8"))
    viol = max(pb.lower * (1 - slack) - fb.lower, fb.upper - pb.upper * (1 + slack), 0.0)
    return float(viol), 0.0


def chk_riesz(ctx, p):
    ok, _ = is_riesz(ctx.family(p.get("family", "phi")))
    return (0.0 if ok else 1.0), 0.0


def chk_biorth(ctx, p):
    a, b = p.get("families", ["eta", "chi"])
    n = int(p.get("n_max", 12)) + 1
    F, G = ctx.family(a), ctx.family(b)
    F = VectorFamily(F.matrix[:, :n], F.space)
    G = VectorFamily(G.matrix[:, :n], G.space)
    return biorthogonality_defect(F, G), None


def chk_eigen(ctx, p):
    s = ctx.extra["oscillator"]
    ops = gallery.oscillator_operators(s)
    worst = 0.0
    for which in p.get("which", ["H", "H1"]):
        for n in range(int(p.get("n_max", 8)) + 1):
            worst = max(worst, gallery.oscillator_eigencheck(s, which, n, ops))
    return worst, None


def chk_pi(ctx, p):
    s = ctx.extra["oscillator"]
    worst = 0.0
    for n in range(int(p.get("n_max", 20)) + 1):
        grid_val = np.sum(s.space.weights * s.sigma.coords.conj() * s.eta.matrix[:, n])
        worst = max(worst, abs(grid_val - gallery.pi_n(n, s.alpha)))
    return float(worst), None


def chk_column_sup(ctx, p):
    sup = ctx.reference["column_sup"]
    if p.get("against", "bound") == "limit":
        return abs(sup - ctx.reference["limit_sup"]), None
    return sup, None


def _counter_tests(ctx):
    K = ctx.extra["K"]
    sp = ctx.space
    vs = [sp.basis_vector(k) for k in range(K)]
    vs.append(sp.basis_vector(0) + sp.basis_vector(1))
    V = random_tests(sp, 8, ctx.seed)
    vs += [ComplexVector(V[:, j], sp) for j in range(V.shape[1])]
    return vs


def chk_forward(ctx, p):
    phi, tilde = ctx.family("phi"), ctx.family("phi_tilde")
    return max(float(partial_sum_trace(phi, tilde, v)[-1]) for v in _counter_tests(ctx)), None


def chk_reversed_jump(ctx, p):
    phi, tilde = ctx.family("phi"), ctx.family("phi_tilde")
    tr = partial_sum_trace(tilde, phi, ctx.space.basis_vector(0))
    second = tr[1::3][1:]  # second member of every group after the first
    return float(1.0 - second.min()), None


def chk_reversed_orth(ctx, p):
    # with <e_1, f> = 0 the within-group jumps vanish and the full sum returns f
    phi, tilde = ctx.family("phi"), ctx.family("phi_tilde")
    worst = 0.0
    for v in _counter_tests(ctx):
        c = v.coords.copy()
        c[0] = 0.0
        tr = partial_sum_trace(tilde, phi, ComplexVector(c, ctx.space))
        jumps = np.abs(tr[1::3] - tr[0::3]).max()
        worst = max(worst, float(tr[-1]), float(jumps))
    return worst, None


def chk_biorthonormality(ctx, p):
    n = int(p.get("n_max", 60))
    bad = sum(dist.biorthonormality(i, j) != (i == j) for i in range(n + 1) for j in range(n + 1))
    return float(bad), 0.0


def chk_quasi_identity(ctx, p):
    _, _, r = dist.quasi_identity_partial(ctx.extra["f"], ctx.extra["g"], int(p["N"]))
    return r, None


def chk_deformed(ctx, p):
    _, _, r = dist.deformed_quasi_identity(ctx.extra["multiplier"], ctx.extra["f"], ctx.extra["g"], int(p["N"]),
                                           p.get("chain", "phi"))
    return r, None


def chk_contraction(ctx, p):
    c = ctx.extra["multiplier"].contraction
    if "expected" in p:
        return abs(c - num(p["expected"])), None
    return c, None


def chk_reciprocal(ctx, p):
    sc = ctx.extra["multiplier"]
    order = int(p.get("order", 30)) + 1
    worst = 0.0
    for f, finv in ((sc.m, sc.m_inv), (sc.l, sc.l_inv)):
        conv = np.convolve(f.taylor[:order], finv.taylor[:order])[:order]
        conv[0] -= 1.0
        worst = max(worst, float(np.max(np.abs(conv))))
    return worst, None


def chk_adjoint(ctx, p):
    sc, f = ctx.extra["multiplier"], ctx.extra["f"]
    worst = 0.0
    for n in range(int(p.get("n_max", 10)) + 1):
        a = dist.moment_pairing(f, n, weight=lambda x: sc.m(x)).value  # <f, m Phi_n>
        b = dist.moment_pairing(sc.m * f, n).value  # <m f, Phi_n>
        worst = max(worst, abs(a - b))
    return worst, None


def chk_taylor(ctx, p):
    fs = [ctx.extra["multiplier"].m, ctx.extra["multiplier"].l, ctx.extra["f"], ctx.extra["g"]]
    return max(f.self_consistency() for f in fs), None


CHECKS: dict[str, tuple[Callable, str]] = {
    "verdict": (chk_verdict, "certificate verdict: the condition's inequality holds strictly"),
    "constant": (chk_constant, "measured perturbation constant against its threshold"),
    "closed_form": (chk_closed_form, "constructed operator or dual family equals its closed form"),
    "reconstruction": (chk_reconstruction, "sum <phi_n, f> phi~_n = f and sum <psi~_n, f> psi_n = f"),
    "log": (chk_log, "construction log entry"),
    "gram_symmetry": (chk_gram, "<phi_n, phi~_m> = <psi~_n, psi_m>"),
    "excess_transport": (chk_excess, "e(phi~) = e(psi) and e(psi~) = e(phi)"),
    "predicted_bounds": (chk_predicted, "measured frame bounds lie inside the predicted interval"),
    "is_riesz": (chk_riesz, "family is a frame with zero excess"),
    "biorthogonality": (chk_biorth, "<eta_n, chi_m> = delta_nm"),
    "eigen_residual": (chk_eigen, "H_j v_n = E_n v_n with E_n = n + 1/2 + alpha^2"),
    "pi_closed_form": (chk_pi, "<e_0, eta_n> = (-alpha)^n e^{alpha^2/2} / sqrt(n!)"),
    "column_sup": (chk_column_sup, "sup_k sum_{n>=k} |lam gamma_{n,k} - 1|^2"),
    "forward_residual": (chk_forward, "grouped series sum <phi_n, f> phi~_n = f"),
    "reversed_jump": (chk_reversed_jump, "swapped series jumps by <e_1, f> inside every group"),
    "reversed_orthogonal": (chk_reversed_orth, "swapped series converges when <e_1, f> = 0"),
    "biorthonormality": (chk_biorthonormality, "<Phi_n, eta_m> = delta_nm in exact arithmetic"),
    "quasi_identity": (chk_quasi_identity, "sum <f, Phi_n><eta_n, g> = <f, g>"),
    "deformed_quasi_identity": (chk_deformed, "sum <f, phi_n><phi~_n, g> = <f, g> for the deformed families"),
    "contraction": (chk_contraction, "||M^dagger L - 1|| <= sup |m l - 1|"),
    "reciprocal_taylor": (chk_reciprocal, "Taylor(f) * Taylor(1/f) = (1, 0, 0, ...)"),
    "adjoint_transfer": (chk_adjoint, "<f, m Phi_n> = <m f, Phi_n> for real m"),
    "taylor_consistency": (chk_taylor, "evaluator and truncated Taylor series agree on [-1, 1]"),
}


def _bound(check: dict, default: float | None) -> float:
    if "bound" in check:
        b = num(check["bound"])
    elif default is not None:
        b = default
    else:
        raise SchemaError(f"check {check['name']!r} needs a bound")
    return _strict(b) if check.get("strict", False) else b


# -- running -------------------------------------------------------------------


def build_context(data: dict) -> Context:
    model = MODELS[data["model"]["generator"]]
    seed = int(data.get("seed", 0))
    ctx = model.build(data["model"].get("params", {}), data["space"], seed)
    ctx.seed = seed
    ctx.tolerances = {k: num(v) for k, v in data.get("tolerances", {}).items()}
    return ctx


def _record(name, kind, status, measured, bound, ms, message=None):
    rec = {"name": name, "kind": kind, "status": status, "measured": measured, "bound": bound, "runtime_ms": ms}
    if message is not None:
        rec["message"] = message
    return rec


def run_scenario(data: dict, timings: bool = False) -> dict:
    """Execute a parsed scenario and return the report dict."""
    model = MODELS[data["model"]["generator"]]
    ctx = build_context(data)
    pert = data.get("perturbation", {"condition": "none"})
    cond = pert.get("condition", "none")
    lam = parse_lambda(pert.get("lambda", "1"))
    cert_error = None
    if CONDITIONS[cond] is not None:
        try:
            ctx.cert, ctx.dual = CONDITIONS[cond](ctx, lam, pert.get("params", {}))
        except QuasiFramesError as exc:
            cert_error = f"{type(exc).__name__}: {exc}"

    records = []
    provenance = {"generator": model.anchor, "scenario": ctx.anchor, "checks": {}}
    for check in data.get("checks", []):
        fn, anchor = CHECKS[check["kind"]]
        provenance["checks"][check["name"]] = check.get("anchor", anchor)
        t0 = time.perf_counter()
        try:
            measured, default = fn(ctx, check.get("params", {}))
            bound = _bound(check, default)
            ok = measured <= bound
            status = "pass" if ok else "fail"
            message = None
        except (QuasiFramesError, KeyError, ValueError, ArithmeticError) as exc:
            measured, bound, status, message = None, None, "error", f"{type(exc).__name__}: {exc}"
        ms = round((time.perf_counter() - t0) * 1e3, 3) if timings else None
        records.append(_record(check["name"], check["kind"], status, measured, bound, ms, message))

    summary = {s: sum(r["status"] == s for r in records) for s in ("pass", "fail", "error")}
    return {
        "scenario": data.get("name", data["model"]["generator"]),
        "generator": data["model"]["generator"],
        "seed": ctx.seed,
        "condition": cond,
        "lambda": [lam.real, lam.imag],
        "certificate": None if ctx.cert is None else ctx.cert.to_dict(),
        "certificate_error": cert_error,
        "checks": records,
        "provenance": provenance,
        "summary": summary,
    }


def exit_code(report: dict) -> int:
    if report["summary"]["error"] or report.get("certificate_error"):
        return 2
    return 1 if report["summary"]["fail"] else 0


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def report_csv(report: dict) -> str:
    lines = ["name,kind,status,measured,bound"]
    for r in report["checks"]:
        lines.append(f"{r['name']},{r['kind']},{r['status']},{_fmt(r['measured'])},{_fmt(r['bound'])}")
    return "\n".join(lines) + "\n"


def scan_scenario(data: dict, lam_from: float, lam_to: float, steps: int) -> list[tuple[complex, float, bool]]:
    """``(lam, alpha, verdict)`` on an evenly spaced real grid for the scenario's ``(phi, psi)``."""
    if steps < 1:
        raise SchemaError("steps must be positive")
    lams = np.linspace(lam_from, lam_to, steps) if steps > 1 else np.array([lam_from])
    if np.any(lams == 0):
        raise SchemaError("lambda = 0 is not allowed in the scan grid")
    ctx = build_context(data)
    return scan_lambda(ctx.family("phi"), ctx.family("psi"), [complex(x) for x in lams], ctx.subspace)


def scan_csv(rows) -> str:
    lines = ["lambda,alpha,verdict"]
    for lam, alpha, ok in rows:
        lines.append(f"{lam.real!r},{alpha!r},{str(bool(ok)).lower()}")
    return "\n".join(lines) + "\n"
