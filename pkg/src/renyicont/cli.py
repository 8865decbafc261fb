"""Command-line front end.

stdout carries exactly one JSON document per invocation; prose goes to stderr.
Exit codes: 0 success, 1 input error, 2 solver uncertain, 3 verified violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds
from .entropy import (VALID_ORDERS, RenyiOrder, SolverConfig, _SOLVERS, as_order, conditional_entropy_up,
                      dual_order, duality_values, hmax, hmin, von_neumann_conditional)
from .errors import SolverError, ValidationError
from .harness import (CHECKS, DEFAULT_HIGH_ORDERS, DEFAULT_LOW_ORDERS, CampaignConfig, default_config,
                      format_summary, run_campaign, run_extremal_probe)
from .states import load_state, sample_random_state

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNCERTAIN = 2
EXIT_VIOLATION = 3

SEED_ENV = "RENYICONT_SEED"
SIG_DIGITS = 12

FORMULAS = """\
formulas (logs base 2, eps = trace distance, d = d_A):
  afw      2 eps log d + (1+eps) h(eps/(1+eps))                 von Neumann, tight
  thm1     log(1+eps) + 1/(1-a) log(1 + eps^a d^(2(1-a)) - eps/(1+eps)^(1-a))
                                                                a in [1/2, 1)
  thm1cl   log(1+eps) + 1/(1-a) log(1 + eps^a d^(1-a) - eps/(d(1+eps))^(1-a))
                                                                a in [1/2, 1), A classical
  cor1     thm1 evaluated at r = sqrt(2 eps) and order b = a/(2a-1)
                                                                a in (1, inf]
  thm3     log(1 + eps d^2)                                     min-entropy
  jd       1/(1-a) log((1-eps)^a + eps^a (d-1)^(1-a))           classical comparison
  leditzky 2a/(1-a) log F                                       lower bound on H_a(rho) - H_b(sigma)
"""


def _round(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


def emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(_round(payload), sort_keys=True) + "\n")


def warn(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _matrix_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def parse_order(text: str) -> RenyiOrder:
    try:
        return RenyiOrder.parse(text)
    except (ValidationError, ValueError, ZeroDivisionError):
        raise ValidationError(f"invalid --alpha {text!r}: the order must lie in {VALID_ORDERS}") from None


def _order_text(order: RenyiOrder) -> str:
    return "inf" if order.is_infinite else f"{order.value:.{SIG_DIGITS}g}"


def parse_dims(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        try:
            a, b = part.lower().split("x")
            out.append((int(a), int(b)))
        except ValueError:
            raise ValidationError(f"cannot parse dims {part!r}; use e.g. 2x2,2x3") from None
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse number list {text!r}") from None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV}={raw!r} is not an integer") from None


# -- subcommands ------------------------------------------------------------------

def cmd_compute(args) -> int:
    state = load_state(args.state)
    kind = args.entropy
    if kind == "vn":
        emit({"entropy": "vn", "value": von_neumann_conditional(state), "solver": "closed-form",
              "residual": 0.0, "converged": True})
        return EXIT_OK
    if kind == "hmin":
        r = hmin(state)
    else:
        solvers = tuple(s.strip() for s in args.solver.split(",")) if args.solver else ("fixed-point",)
        for s in solvers:
            if s not in _SOLVERS:
                raise ValidationError(f"unknown solver {s!r}; choose from {sorted(_SOLVERS)}")
        config = SolverConfig(solvers=solvers, fallback=not args.no_fallback, seed=args.seed)
        if kind == "hmax":
            r = hmax(state, config)
        else:
            if args.alpha is None:
                raise ValidationError(f"--entropy sandwich needs --alpha in {VALID_ORDERS}")
            order = parse_order(args.alpha)
            r = hmin(state) if order.is_infinite else conditional_entropy_up(state, order, config)
    payload = {"entropy": kind, "value": r.value, "solver": r.solver, "iterations": r.iterations,
               "residual": r.residual, "converged": r.converged}
    if r.optimizer is not None:
        payload["optimizer"] = _matrix_json(r.optimizer)
    if "solver_values" in r.details:
        payload["solver_values"] = r.details["solver_values"]
    emit(payload)
    return EXIT_OK if r.converged else EXIT_UNCERTAIN


BOUND_REQUIREMENTS = {
    "thm1": ("eps", "dA", "alpha"),
    "thm1cl": ("eps", "dA", "alpha"),
    "cor1": ("eps", "dA", "alpha"),
    "thm3": ("eps", "dA"),
    "afw": ("eps", "dA"),
    "jd": ("eps", "dA", "alpha"),
    "leditzky": ("fidelity", "alpha"),
}


def cmd_bound(args) -> int:
    need = BOUND_REQUIREMENTS[args.which]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        table = "; ".join(f"{k}: {' '.join('--' + n for n in v)}" for k, v in BOUND_REQUIREMENTS.items())
        raise ValidationError(f"--which {args.which} needs {' '.join(missing)} (requirements: {table})")
    order = parse_order(args.alpha) if args.alpha is not None else None
    eps, d_A = args.eps, args.dA
    warnings = []
    if args.which == "thm1":
        value = bounds.bound_low(eps, d_A, order)
    elif args.which == "thm1cl":
        value = bounds.bound_low_classical(eps, d_A, order)
    elif args.which == "cor1":
        value = bounds.bound_high(eps, d_A, order)
        r = bounds.cor1_radius(eps)
        if r >= 1.0:
            warnings.append(f"sqrt(2 eps) = {r:.6g} reached the boundary 1; formula evaluated as written")
    elif args.which == "thm3":
        value = bounds.bound_hmin(eps, d_A)
    elif args.which == "afw":
        value = bounds.afw_von_neumann(eps, d_A)
    elif args.which == "jd":
        value = bounds.bound_jabbour_datta(eps, d_A, order)
        if d_A >= 2 and eps > 1.0 - 1.0 / d_A:
            warnings.append(f"eps beyond 1 - 1/d_A = {1 - 1 / d_A:.6g}: the formula decreases there")
    else:
        value = bounds.leditzky_gap(args.fidelity, order)
    inputs = {k: getattr(args, k) for k in need if k != "alpha"}
    if order is not None:
        inputs["alpha"] = _order_text(order)
    payload = {"which": args.which, "inputs": inputs, "value": value}
    if d_A is not None and args.which != "leditzky":
        payload["diameter"] = bounds.trivial_diameter(d_A)
    if warnings:
        payload["warnings"] = warnings
        for w in warnings:
            warn("warning: " + w)
    emit(payload)
    return EXIT_OK


_PRESET_FOR_CHECK = {"thm1": "thm1", "thm1-classical": "classical", "jabbour-compare": "classical",
                     "cor1": "cor1", "thm3-hmin": "thm3", "duality": "duality", "dpi": "dpi",
                     "mccarthy": "mccarthy", "leditzky": "leditzky"}


def build_verify_config(args) -> CampaignConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
                                  f"{exc.msg}") from None
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        try:
            base = CampaignConfig.from_dict(data)
        except TypeError as exc:
            raise ValidationError(f"bad config: {exc}") from None
        kw = {}
    else:
        checks = args.check or None
        if args.preset:
            preset = args.preset
        elif checks and len({_PRESET_FOR_CHECK[c] for c in checks}) == 1:
            preset = _PRESET_FOR_CHECK[checks[0]]
        else:
            preset = "thm1"
        kw = {}
        if checks:
            kw["checks"] = tuple(checks)
            if len({_PRESET_FOR_CHECK[c] for c in checks}) > 1 and args.alpha is None:
                kw["orders"] = DEFAULT_LOW_ORDERS + DEFAULT_HIGH_ORDERS
        base = default_config(preset, **kw)
        kw = {}
    if args.dims:
        kw["dims"] = tuple(parse_dims(args.dims))
    if args.alpha:
        kw["orders"] = tuple(parse_order(a).value for a in args.alpha.split(","))
    if args.eps:
        kw["epsilons"] = tuple(_floats(args.eps))
    if args.samples is not None:
        kw["samples_per_cell"] = args.samples
    if args.ensemble:
        kw["ensemble"] = args.ensemble
    if args.perturbation:
        kw["perturbation"] = args.perturbation
    if args.seed_given:
        kw["seed"] = args.seed
    elif not args.config:
        kw["seed"] = args.seed
    if args.jobs is not None:
        kw["jobs"] = args.jobs
    if args.tolerance is not None:
        kw["violation_tolerance"] = args.tolerance
    if not kw:
        return base
    d = base.to_dict()
    d.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in kw.items()})
    return CampaignConfig.from_dict(d)


def cmd_verify(args) -> int:
    config = build_verify_config(args)
    if "thm1-classical" in config.checks or "jabbour-compare" in config.checks:
        if config.perturbation != "classical-only":
            warn("note: classical checks always use fully classical states and classical-only perturbations")
    progress = (lambda done, total: warn(f"cell {done}/{total}")) if args.progress else None
    report = run_campaign(config, progress)
    out = args.out
    if out:
        report.write_json(out + ".json")
        report.write_csv(out + ".csv")
    warn(format_summary(report))
    emit({"schema": 1, "passed": report.passed, "records": len(report.records), "violations": report.violations,
          "uncertain": report.uncertain, "uncertain_rate": report.uncertain_rate, "min_margin": report.min_margin,
          "cells": [{"cell": c["cell"], "check": c["check"], "dims": c["dims"], "order": c["order"],
                     "epsilon": c["epsilon"], "variant": c["variant"], "min_margin": c["min_margin"],
                     "violations": c["violations"], "uncertain": c["uncertain"]} for c in report.cells],
          "reports": None if not out else {"json": out + ".json", "csv": out + ".csv"}})
    if report.has_violation:
        return EXIT_VIOLATION
    if report.uncertain_exceeded:
        return EXIT_UNCERTAIN
    return EXIT_OK


def cmd_duality(args) -> int:
    order = parse_order(args.alpha)
    if args.state:
        state = load_state(args.state)
    else:
        d_a, d_b = parse_dims(args.dims)[0]
        state = sample_random_state(d_a, d_b, args.ensemble, args.seed)
    h_ab, h_ac = duality_values(state, order)
    emit({"alpha": _order_text(order), "beta": _order_text(dual_order(order)), "h_ab": h_ab.value, "h_ac": h_ac.value,
          "residual": abs(h_ab.value + h_ac.value), "solvers": [h_ab.solver, h_ac.solver],
          "converged": bool(h_ab.converged and h_ac.converged)})
    return EXIT_OK if h_ab.converged and h_ac.converged else EXIT_UNCERTAIN


def cmd_probe(args) -> int:
    order = parse_order(args.alpha)
    dims = parse_dims(args.dims)[0]
    rec = run_extremal_probe(dims, order, args.eps, restarts=args.restarts, seed=args.seed,
                             classical=args.classical, maxfev=args.maxfev)
    emit(rec.to_dict())
    return EXIT_UNCERTAIN if rec.status == "solver-uncertain" else EXIT_OK


# -- parser -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        warn(f"{self.prog}: error: {message}")
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    seed_help = f"random seed (default from ${SEED_ENV}, else 0)"
    p = _Parser(prog="renyicont", description="Sandwiched Rényi conditional entropies and their continuity bounds.",
                epilog=FORMULAS, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="entropy of a state file", formatter_class=argparse.RawDescriptionHelpFormatter,
                       description="H~_a(A|B) = sup_eta 1/(1-a) log tr[(eta^g rho eta^g)^a], g = (1-a)/(2a);\n"
                                   "hmin: -log min{tr X : I (x) X >= rho}; hmax: a = 1/2; vn: H(AB) - H(B).")
    c.add_argument("--state", required=True, help="state JSON file (or probability table)")
    c.add_argument("--alpha", help=f"Rényi order in {VALID_ORDERS}; 'inf' accepted")
    c.add_argument("--entropy", choices=("sandwich", "hmin", "hmax", "vn"), default="sandwich")
    c.add_argument("--solver", help=f"comma list from {sorted(_SOLVERS)} (default fixed-point)")
    c.add_argument("--no-fallback", action="store_true", help="do not add fallback solvers")
    c.add_argument("--seed", type=int, default=None, help=seed_help)
    c.set_defaults(func=cmd_compute)

    b = sub.add_parser("bound", help="evaluate a continuity bound", epilog=FORMULAS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("--which", required=True, choices=tuple(BOUND_REQUIREMENTS))
    b.add_argument("--eps", type=float)
    b.add_argument("--dA", type=int)
    b.add_argument("--alpha")
    b.add_argument("--fidelity", type=float)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="run a verification campaign", epilog=FORMULAS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("--config", help="campaign config JSON (CampaignConfig fields)")
    v.add_argument("--preset", choices=("thm1", "classical", "cor1", "thm3", "duality", "dpi", "mccarthy", "leditzky"))
    v.add_argument("--check", action="append", choices=CHECKS, help="repeatable")
    v.add_argument("--dims", help="e.g. 2x2,2x3")
    v.add_argument("--alpha", help="comma list of orders")
    v.add_argument("--eps", help="comma list of trace distances")
    v.add_argument("--samples", type=int, help="samples per cell")
    v.add_argument("--ensemble")
    v.add_argument("--perturbation")
    v.add_argument("--tolerance", type=float, help="violation tolerance (default 1e-6)")
    v.add_argument("--seed", type=int, default=None, help=seed_help)
    v.add_argument("--jobs", type=int, help="parallel worker processes (default 1)")
    v.add_argument("--out", help="report path prefix; writes PREFIX.json and PREFIX.csv")
    v.add_argument("--progress", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("duality", help="H_a(A|B) + H_b(A|C) for a purification",
                       description="checks H~_a(A|B) = -H~_b(A|C) with 1/a + 1/b = 2 on the spectral purification")
    d.add_argument("--state")
    d.add_argument("--dims", default="2x2")
    d.add_argument("--ensemble", default="hilbert-schmidt")
    d.add_argument("--alpha", required=True)
    d.add_argument("--seed", type=int, default=None, help=seed_help)
    d.set_defaults(func=cmd_duality)

    pr = sub.add_parser("probe", help="search for near-tight perturbations (reporting only)")
    pr.add_argument("--dims", default="2x2")
    pr.add_argument("--alpha", required=True)
    pr.add_argument("--eps", type=float, required=True)
    pr.add_argument("--restarts", type=int, default=3)
    pr.add_argument("--maxfev", type=int, default=400)
    pr.add_argument("--classical", action="store_true")
    pr.add_argument("--seed", type=int, default=None, help=seed_help)
    pr.set_defaults(func=cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        args.seed_given = getattr(args, "seed", None) is not None
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except ValidationError as exc:
        warn(f"error: {exc}")
        return EXIT_INPUT
    except SolverError as exc:
        warn(f"solver uncertain: {exc}")
        emit({"converged": False, "value": exc.value, "residual": exc.residual, "error": str(exc)})
        return EXIT_UNCERTAIN


if __name__ == "__main__":
    sys.exit(main())
