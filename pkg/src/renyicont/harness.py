"""Randomized verification campaigns.

A campaign is a list of independent cells (one check at one grid point);
each cell draws ``samples_per_cell`` seeded instances and records, for every
instance, an inequality ``difference <= bound`` together with the margin
``bound - difference``:

================  ===================================  ======================================
check             difference                           bound
================  ===================================  ======================================
thm1              ``|H_a(sigma) - H_a(rho)|``          low-order bound at realized eps
thm1-classical    same, fully classical states         classical low-order bound
jabbour-compare   same, fully classical states         Jabbour-Datta envelope
cor1              same, ``alpha > 1``                  high-order bound
thm3-hmin         same with ``H_min``                  ``log2(1 + eps d_A^2)``
leditzky          ``H_b(sigma) - H_a(rho)``            ``-(2a/(1-a)) log2 F(rho, sigma)``
duality           ``|H_a(A|B) + H_b(A|C)|``            ``DUALITY_HARD_TOL``
dpi               ``D_a(Phi(P)||Phi(Q))``              ``D_a(P||Q)``
mccarthy          ``tr (P+Q)^a``                       ``tr P^a + tr Q^a``
================  ===================================  ======================================

Per-cell seeds come from ``SeedSequence([seed, cell_index])`` so cells can be
run in any order or in parallel without changing a single record.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import bounds
from . import operators as ops
from .entropy import (DEFAULT_CONFIG, RenyiOrder, SolverConfig, as_order, classical_conditional_entropy,
                      conditional_entropy, dual_order, duality_values, renyi_entropy, sandwiched_divergence)
from .errors import SolverError, ValidationError
from .states import (BipartiteState, PerturbationSpec, ENSEMBLES, PERTURBATION_MODES, make_cq_state, make_rng,
                     perturb_within, random_density, random_psd, random_table, random_unitary, sample_random_state)

SCHEMA_VERSION = 1

CHECKS = ("thm1", "thm1-classical", "cor1", "thm3-hmin", "duality", "dpi", "mccarthy", "jabbour-compare", "leditzky")
CLASSICAL_CHECKS = ("thm1-classical", "jabbour-compare")

DEFAULT_DIMS = ((2, 2), (2, 3), (3, 2), (2, 4))
DEFAULT_LOW_ORDERS = (0.5, 0.6, 0.75, 0.9, 0.99)
DEFAULT_HIGH_ORDERS = (1.01, 1.5, 2.0, 5.0, math.inf)
DEFAULT_EPSILONS = (0.01, 0.05, 0.1, 0.25, 0.5, 0.9)
DEFAULT_SAMPLES = 200

MCCARTHY_ORDERS = (0.0, 0.25, 0.5, 0.75, 1.0)
DPI_ORDERS = (0.5, 0.75, 2.0, 5.0)
DPI_CHANNELS = ("partial-trace", "unitary", "pinching", "mixing")

MCCARTHY_TOL = 1e-8
DPI_TOL = 1e-7
DUALITY_SOFT_TOL = 1e-5
DUALITY_HARD_TOL = 1e-4
CLASSICAL_ORDER_TOL = 1e-10

STATUS_PASS = "pass"
STATUS_VIOLATION = "violation"
STATUS_UNCERTAIN = "solver-uncertain"


def _order_label(order) -> str | None:
    if order is None:
        return None
    if isinstance(order, (int, float)) and (order < 0.5 or order == 1.0):
        # McCarthy exponents live outside the Rényi order range
        return repr(float(order))
    return str(as_order(order))


def _tuple_dims(dims) -> tuple:
    out = tuple((int(a), int(b)) for a, b in dims)
    if any(a < 1 or b < 1 for a, b in out):
        raise ValidationError(f"dimensions must be positive: {out}")
    return out


@dataclass(frozen=True)
class CampaignConfig:
    """Campaign grid and knobs.

    ``orders`` feed the entropy checks; each check keeps only the orders in
    its range (``alpha < 1`` for the ``thm1``-style checks, ``alpha > 1`` for the
    high-order bound).  ``dpi`` and ``mccarthy`` use their own fixed order
    sets unless ``orders`` already lies inside them.
    """

    dims: tuple = DEFAULT_DIMS
    orders: tuple = DEFAULT_LOW_ORDERS
    epsilons: tuple = DEFAULT_EPSILONS
    samples_per_cell: int = DEFAULT_SAMPLES
    ensemble: str = "hilbert-schmidt"
    perturbation: str = "mixing"
    seed: int = 0
    checks: tuple = ("thm1",)
    violation_tolerance: float = 1e-6
    uncertain_cap: float = 0.02
    jobs: int = 1
    solver: SolverConfig = DEFAULT_CONFIG

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "dims", _tuple_dims(self.dims))
        set_(self, "orders", tuple(as_order(o).value for o in self.orders))
        set_(self, "epsilons", tuple(float(e) for e in self.epsilons))
        set_(self, "checks", tuple(self.checks))
        if not self.dims or not self.orders or not self.epsilons or not self.checks:
            raise ValidationError("dims, orders, epsilons and checks must be nonempty")
        if int(self.samples_per_cell) < 1:
            raise ValidationError(f"samples_per_cell must be >= 1, got {self.samples_per_cell}")
        for e in self.epsilons:
            if not 0.0 <= e <= 1.0:
                raise ValidationError(f"epsilon {e} outside [0, 1]")
        for c in self.checks:
            if c not in CHECKS:
                raise ValidationError(f"unknown check {c!r}; choose from {CHECKS}")
        base = self.ensemble.split("-")[0] if self.ensemble.startswith("rank-") else self.ensemble
        if self.ensemble not in ENSEMBLES and base != "rank":
            raise ValidationError(f"unknown ensemble {self.ensemble!r}; choose from {ENSEMBLES}")
        if self.perturbation not in PERTURBATION_MODES:
            raise ValidationError(f"unknown perturbation {self.perturbation!r}; choose from {PERTURBATION_MODES}")
        if self.violation_tolerance < 0 or not 0 <= self.uncertain_cap <= 1:
            raise ValidationError("tolerances must be nonnegative and the uncertain cap in [0, 1]")
        if int(self.jobs) < 1:
            raise ValidationError("jobs must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["orders"] = [_order_label(o) for o in self.orders]
        d["dims"] = [list(x) for x in self.dims]
        d["solver"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.solver).items()}
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        data = dict(data)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "solver" in data:
            s = dict(data["solver"])
            if "solvers" in s:
                s["solvers"] = tuple(s["solvers"])
            data["solver"] = SolverConfig(**s)
        for key in ("dims", "orders", "epsilons", "checks"):
            if key in data:
                data[key] = tuple(tuple(x) if key == "dims" else x for x in data[key])
        return cls(**data)


@dataclass
class SampleRecord:
    cell: int
    sample: int
    check: str
    seed: int
    dims: tuple
    order: str | None
    epsilon: float | None
    realized: float | None
    h_rho: dict | None
    h_sigma: dict | None
    difference: float
    bound: float
    margin: float
    status: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        return d

    CSV_FIELDS = ("cell", "sample", "check", "seed", "d_A", "d_B", "order", "epsilon", "realized",
                  "h_rho", "h_sigma", "difference", "bound", "margin", "status")

    def csv_row(self) -> list:
        return [self.cell, self.sample, self.check, self.seed, self.dims[0], self.dims[1], self.order,
                self.epsilon, self.realized,
                None if self.h_rho is None else self.h_rho["value"],
                None if self.h_sigma is None else self.h_sigma["value"],
                self.difference, self.bound, self.margin, self.status]


@dataclass
class Cell:
    index: int
    check: str
    dims: tuple
    order: float | None
    epsilon: float | None
    variant: str | None = None

    def key(self) -> dict:
        return {"cell": self.index, "check": self.check, "dims": list(self.dims), "order": _order_label(self.order),
                "epsilon": self.epsilon, "variant": self.variant}


@dataclass
class CampaignReport:
    config: CampaignConfig
    records: list
    cells: list
    elapsed: float = 0.0
    generated: float = 0.0

    @property
    def violations(self) -> int:
        return sum(r.status == STATUS_VIOLATION for r in self.records)

    @property
    def uncertain(self) -> int:
        return sum(r.status == STATUS_UNCERTAIN for r in self.records)

    @property
    def uncertain_rate(self) -> float:
        return self.uncertain / max(len(self.records), 1)

    @property
    def has_violation(self) -> bool:
        return self.violations > 0

    @property
    def uncertain_exceeded(self) -> bool:
        return self.uncertain_rate > self.config.uncertain_cap

    @property
    def passed(self) -> bool:
        return not self.has_violation and not self.uncertain_exceeded

    @property
    def min_margin(self) -> float:
        m = [r.margin for r in self.records if r.status != STATUS_UNCERTAIN and math.isfinite(r.margin)]
        return min(m) if m else math.inf

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "summary": {"records": len(self.records), "violations": self.violations, "uncertain": self.uncertain,
                        "uncertain_rate": self.uncertain_rate, "min_margin": _finite_or_none(self.min_margin),
                        "passed": self.passed},
            "cells": self.cells,
            "records": [r.to_dict() for r in self.records],
            "timing": {"generated": self.generated, "elapsed_seconds": self.elapsed},
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(_jsonable(self.to_dict()), fh, indent=1, sort_keys=True, allow_nan=False)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["schema"] + list(SampleRecord.CSV_FIELDS))
            for r in self.records:
                w.writerow([SCHEMA_VERSION] + ["" if v is None else v for v in r.csv_row()])


def _finite_or_none(x):
    return x if x is None or math.isfinite(x) else None


def _jsonable(obj):
    # non-finite floats become strings so the JSON stays standard
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


# -- cell construction ----------------------------------------------------------

def _low(orders):
    return [o for o in orders if o < 1.0]


def _high(orders):
    return [o for o in orders if o > 1.0]


def build_cells(config: CampaignConfig) -> list[Cell]:
    cells = []

    def add(check, dims, order, eps, variant=None):
        cells.append(Cell(len(cells), check, dims, order, eps, variant))

    for check in config.checks:
        if check in ("thm1", "leditzky") + CLASSICAL_CHECKS:
            for d in config.dims:
                for o in _low(config.orders):
                    for e in config.epsilons:
                        add(check, d, o, e)
        elif check == "cor1":
            for d in config.dims:
                for o in _high(config.orders):
                    for e in config.epsilons:
                        add(check, d, o, e)
        elif check == "thm3-hmin":
            for d in config.dims:
                for e in config.epsilons:
                    add(check, d, math.inf, e)
        elif check == "duality":
            for d in config.dims:
                for o in config.orders:
                    add(check, d, o, None)
        elif check == "dpi":
            orders = [o for o in config.orders if o in DPI_ORDERS] or list(DPI_ORDERS)
            for d in config.dims:
                for o in orders:
                    for ch in DPI_CHANNELS:
                        add(check, d, o, None, ch)
        elif check == "mccarthy":
            for d in config.dims:
                for o in MCCARTHY_ORDERS:
                    add(check, d, o, None)
    return cells


def _sample_seeds(master: int, cell: int, n: int) -> np.ndarray:
    return np.random.SeedSequence([int(master), int(cell)]).generate_state(2 * n, dtype=np.uint64)


# -- per-sample evaluation --------------------------------------------------------

def _entropy(state: BipartiteState, order, config: CampaignConfig) -> tuple[float, dict, bool]:
    """``(value, summary, converged)``; solver failures are folded into ``converged``."""
    try:
        r = conditional_entropy(state, order, config.solver)
        s = r.summary()
        if r.solver == "sdp":
            s["feasibility"] = r.details.get("feasibility")
        return r.value, s, bool(r.converged)
    except SolverError as exc:
        return (exc.value if exc.value is not None else math.nan,
                {"value": exc.value, "solver": "failed", "iterations": exc.iterations, "residual": exc.residual,
                 "converged": False, "error": str(exc)}, False)


def _status(margin: float, converged: bool, tol: float) -> str:
    if not converged:
        return STATUS_UNCERTAIN
    if math.isnan(margin):
        return STATUS_UNCERTAIN
    return STATUS_VIOLATION if margin < -tol else STATUS_PASS


def continuity_bound(check: str, eps: float, d_A: int, order) -> float:
    """The bound a continuity check compares against, at trace distance ``eps``."""
    if check == "thm1":
        return bounds.bound_low(eps, d_A, order)
    if check == "thm1-classical":
        return bounds.bound_low_classical(eps, d_A, order)
    if check == "jabbour-compare":
        return bounds.bound_jabbour_datta_envelope(eps, d_A, order)
    if check == "cor1":
        return bounds.bound_high(eps, d_A, order)
    if check == "thm3-hmin":
        return bounds.bound_hmin(eps, d_A)
    raise ValidationError(f"{check!r} is not a continuity check")


def _pair(cell: Cell, config: CampaignConfig, s_state: int, s_pert: int):
    d_A, d_B = cell.dims
    if cell.check in CLASSICAL_CHECKS:
        rho = make_cq_state(random_table(d_A, d_B, make_rng(int(s_state))))
        mode = "classical-only"
    else:
        rho = sample_random_state(d_A, d_B, config.ensemble, int(s_state))
        mode = config.perturbation
    spec = PerturbationSpec(cell.epsilon, mode, int(s_pert))
    sigma, realized = perturb_within(rho, spec, config.ensemble)
    return rho, sigma, float(realized)


def _classical_entropy(state: BipartiteState, order) -> tuple[float, dict, bool]:
    table = np.diag(state.matrix).real.reshape(state.d_A, state.d_B)
    v = classical_conditional_entropy(np.clip(table, 0.0, None), order)
    return v, {"value": v, "solver": "closed-form", "iterations": 0, "residual": 0.0, "converged": True}, True


def _continuity_record(cell, sample, config, s_state, s_pert) -> SampleRecord:
    d_A = cell.dims[0]
    rho, sigma, realized = _pair(cell, config, s_state, s_pert)
    if cell.check in CLASSICAL_CHECKS:
        hr, sr, cr = _classical_entropy(rho, cell.order)
        hs, ss, cs = _classical_entropy(sigma, cell.order)
    else:
        hr, sr, cr = _entropy(rho, cell.order, config)
        hs, ss, cs = (hr, sr, cr) if realized == 0.0 else _entropy(sigma, cell.order, config)
    diff = abs(hs - hr)
    bound = continuity_bound(cell.check, realized, d_A, cell.order)
    margin = bound - diff
    extra = {"diameter": bounds.trivial_diameter(d_A)}
    if cell.check in CLASSICAL_CHECKS:
        low = bounds.bound_low(realized, d_A, cell.order)
        cl = bounds.bound_low_classical(realized, d_A, cell.order)
        jd = bounds.bound_jabbour_datta_envelope(realized, d_A, cell.order)
        extra.update({"bound_low": low, "bound_low_classical": cl, "bound_jabbour_datta": jd,
                      "jabbour_datta_formula": bounds.bound_jabbour_datta(realized, d_A, cell.order),
                      "classical_le_general": cl <= low + CLASSICAL_ORDER_TOL,
                      "tighter": "thm1-classical" if cl < jd else ("jabbour-datta" if jd < cl else "equal")})
    if cell.check == "cor1":
        extra["radius"] = bounds.cor1_radius(realized)
        extra["radius_exceeds_one"] = bool(realized > 0.5)
    status = _status(margin, cr and cs, config.violation_tolerance)
    if cell.check in CLASSICAL_CHECKS and not extra["classical_le_general"]:
        status = STATUS_VIOLATION
    return SampleRecord(cell.index, sample, cell.check, int(s_state), cell.dims, _order_label(cell.order),
                        cell.epsilon, realized, sr, ss, diff, bound, margin, status, extra)


def _leditzky_record(cell, sample, config, s_state, s_pert) -> SampleRecord:
    rho, sigma, realized = _pair(cell, config, s_state, s_pert)
    beta = dual_order(cell.order)
    hr, sr, cr = _entropy(rho, cell.order, config)
    hs, ss, cs = _entropy(sigma, beta, config)
    f = ops.fidelity(rho.matrix, sigma.matrix)
    gap = bounds.leditzky_gap(min(f, 1.0), cell.order)
    diff = hs - hr
    bound = -gap
    margin = bound - diff
    return SampleRecord(cell.index, sample, cell.check, int(s_state), cell.dims, _order_label(cell.order),
                        cell.epsilon, realized, sr, ss, diff, bound, margin,
                        _status(margin, cr and cs, config.violation_tolerance),
                        {"fidelity": f, "beta": _order_label(beta)})


def _duality_record(cell, sample, config, s_state, s_pert) -> SampleRecord:
    rho = sample_random_state(*cell.dims, config.ensemble, int(s_state))
    try:
        h_ab, h_ac = duality_values(rho, cell.order, config.solver)
        sr, ss = h_ab.summary(), h_ac.summary()
        converged = h_ab.converged and h_ac.converged
        res = abs(h_ab.value + h_ac.value)
    except SolverError as exc:
        sr, ss, converged, res = {"value": exc.value, "converged": False, "error": str(exc)}, None, False, math.nan
    margin = DUALITY_HARD_TOL - res
    return SampleRecord(cell.index, sample, cell.check, int(s_state), cell.dims, _order_label(cell.order),
                        None, None, sr, ss, res, DUALITY_HARD_TOL, margin, _status(margin, converged, 0.0),
                        {"within_soft": bool(res <= DUALITY_SOFT_TOL), "beta": _order_label(dual_order(cell.order))})


def apply_channel(channel: str, m: np.ndarray, dims: tuple, rng_state: dict) -> np.ndarray:
    """Apply one member of a channel family; ``rng_state`` fixes the member."""
    if channel == "partial-trace":
        return ops.partial_trace(m, dims, "A")
    if channel == "unitary":
        u = rng_state["unitary"]
        return u @ m @ u.conj().T
    if channel == "pinching":
        u = rng_state["basis"]
        return u @ np.diag(np.diag(u.conj().T @ m @ u)) @ u.conj().T
    if channel == "mixing":
        lam, tau = rng_state["lambda"], rng_state["fixed"]
        return (1.0 - lam) * m + lam * np.trace(m).real * tau
    raise ValidationError(f"unknown channel {channel!r}")


def _dpi_record(cell, sample, config, s_state, s_pert) -> SampleRecord:
    rng = make_rng(int(s_state))
    n = cell.dims[0] * cell.dims[1]
    p = random_density(n, rng, "hilbert-schmidt")
    q = random_density(n, rng, "hilbert-schmidt")
    ch_rng = make_rng(int(s_pert))
    member = {"unitary": random_unitary(n, ch_rng), "basis": random_unitary(n, ch_rng),
              "lambda": float(ch_rng.uniform(0.05, 0.95)), "fixed": random_density(n, ch_rng, "hilbert-schmidt")}
    before = sandwiched_divergence(p, q, cell.order)
    pp = apply_channel(cell.variant, p, cell.dims, member)
    qq = apply_channel(cell.variant, q, cell.dims, member)
    after = sandwiched_divergence(pp, qq, cell.order)
    margin = math.inf if math.isinf(before) else before - after
    return SampleRecord(cell.index, sample, cell.check, int(s_state), cell.dims, _order_label(cell.order),
                        None, None, None, None, after, before, margin, _status(margin, True, DPI_TOL),
                        {"channel": cell.variant})


def trace_power(m: np.ndarray, alpha: float) -> float:
    """``tr m^alpha`` on the support (``alpha = 0`` gives the rank)."""
    w = np.linalg.eigvalsh(ops.as_hermitian(m))
    w = w[w > ops.support_threshold(w)]
    return float(w.size) if alpha == 0.0 else float(np.sum(w ** alpha))


def _mccarthy_record(cell, sample, config, s_state, s_pert) -> SampleRecord:
    rng = make_rng(int(s_state))
    n = cell.dims[0] * cell.dims[1]
    rp, rq = (int(k) for k in rng.integers(1, n + 1, size=2))
    p = random_psd(n, rng, rp, scale=float(rng.uniform(0.1, 2.0)))
    q = random_psd(n, rng, rq, scale=float(rng.uniform(0.1, 2.0)))
    a = float(cell.order)
    lhs = trace_power(p + q, a)
    rhs = trace_power(p, a) + trace_power(q, a)
    margin = rhs - lhs
    return SampleRecord(cell.index, sample, cell.check, int(s_state), cell.dims, _order_label(a),
                        None, None, None, None, lhs, rhs, margin, _status(margin, True, MCCARTHY_TOL),
                        {"rank_p": rp, "rank_q": rq, "full_rank": bool(rp == n and rq == n),
                         "equality_gap": abs(margin)})


_EVALUATORS = {
    "thm1": _continuity_record,
    "thm1-classical": _continuity_record,
    "jabbour-compare": _continuity_record,
    "cor1": _continuity_record,
    "thm3-hmin": _continuity_record,
    "leditzky": _leditzky_record,
    "duality": _duality_record,
    "dpi": _dpi_record,
    "mccarthy": _mccarthy_record,
}


def run_cell(cell: Cell, config: CampaignConfig) -> list[SampleRecord]:
    n = int(config.samples_per_cell)
    seeds = _sample_seeds(config.seed, cell.index, n)
    out = []
    for i in range(n):
        s_state, s_pert = seeds[2 * i], seeds[2 * i + 1]
        try:
            out.append(_EVALUATORS[cell.check](cell, i, config, s_state, s_pert))
        except SolverError as exc:
            out.append(SampleRecord(cell.index, i, cell.check, int(s_state), cell.dims, _order_label(cell.order),
                                    cell.epsilon, None, None, None, math.nan, math.nan, math.nan,
                                    STATUS_UNCERTAIN, {"error": str(exc)}))
    return out


def _run_cell_args(args):
    return run_cell(*args)


def summarize_cell(cell: Cell, records: list[SampleRecord]) -> dict:
    ok = [r for r in records if r.status != STATUS_UNCERTAIN]
    margins = [r.margin for r in ok if math.isfinite(r.margin)]
    s = cell.key()
    s.update({
        "count": len(records),
        "violations": sum(r.status == STATUS_VIOLATION for r in records),
        "uncertain": sum(r.status == STATUS_UNCERTAIN for r in records),
        "min_margin": min(margins) if margins else None,
        "max_difference": max((r.difference for r in ok if math.isfinite(r.difference)), default=None),
    })
    if cell.check in CLASSICAL_CHECKS:
        tighter = [r.extra["tighter"] for r in records if "tighter" in r.extra]
        s["tighter"] = {k: tighter.count(k) for k in ("thm1-classical", "jabbour-datta", "equal")}
    if cell.check == "duality":
        s["within_soft"] = sum(bool(r.extra.get("within_soft")) for r in ok)
        s["max_residual"] = s.pop("max_difference")
    if cell.check == "cor1":
        s["radius_exceeds_one"] = bool(cell.epsilon is not None and cell.epsilon > 0.5)
    return s


def run_campaign(config: CampaignConfig, progress=None) -> CampaignReport:
    """Run every cell of ``config``; records come back sorted by (cell, sample).

    ``progress`` is an optional callable receiving ``(done, total)``.
    """
    t0 = time.perf_counter()
    generated = time.time()
    cells = build_cells(config)
    results: dict[int, list] = {}
    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=int(config.jobs)) as pool:
            for cell, recs in zip(cells, pool.map(_run_cell_args, [(c, config) for c in cells])):
                results[cell.index] = recs
                if progress:
                    progress(len(results), len(cells))
    else:
        for cell in cells:
            results[cell.index] = run_cell(cell, config)
            if progress:
                progress(len(results), len(cells))
    records = [r for c in cells for r in sorted(results[c.index], key=lambda r: r.sample)]
    summaries = [summarize_cell(c, results[c.index]) for c in cells]
    return CampaignReport(config, records, summaries, time.perf_counter() - t0, generated)


def run_classical_campaign(config: CampaignConfig, progress=None) -> CampaignReport:
    """Fully classical states and perturbations, checked against both classical bounds."""
    if config.perturbation != "classical-only":
        raise ValidationError("the classical campaign needs perturbation='classical-only'")
    checks = tuple(c for c in config.checks if c in CLASSICAL_CHECKS) or CLASSICAL_CHECKS
    return run_campaign(replace(config, checks=checks), progress)


def default_config(kind: str = "thm1", **overrides) -> CampaignConfig:
    """Default grids: ``thm1``, ``classical``, ``cor1``, ``thm3``, ``duality``, ``dpi``, ``mccarthy``, ``leditzky``."""
    presets = {
        "thm1": dict(checks=("thm1",)),
        "classical": dict(checks=CLASSICAL_CHECKS, perturbation="classical-only"),
        "cor1": dict(checks=("cor1",), orders=DEFAULT_HIGH_ORDERS),
        "thm3": dict(checks=("thm3-hmin",)),
        "duality": dict(checks=("duality",), dims=((2, 2), (2, 3)), orders=(0.5, 0.6, 2.0, 5.0), samples_per_cell=63),
        "dpi": dict(checks=("dpi",), dims=((2, 2),), orders=DPI_ORDERS, samples_per_cell=125),
        "mccarthy": dict(checks=("mccarthy",), dims=((2, 1), (2, 2), (2, 3)), samples_per_cell=334),
        "leditzky": dict(checks=("leditzky",), samples_per_cell=20),
    }
    if kind not in presets:
        raise ValidationError(f"unknown preset {kind!r}; choose from {sorted(presets)}")
    kw = presets[kind]
    kw.update(overrides)
    return CampaignConfig(**kw)


# -- extremal probe ---------------------------------------------------------------

def _from_params(x: np.ndarray, n: int) -> np.ndarray:
    g = (x[:n * n] + 1j * x[n * n:]).reshape(n, n)
    m = g @ g.conj().T
    return m / np.trace(m).real


def run_extremal_probe(dims, order, eps: float, restarts: int = 3, seed: int = 0, classical: bool = False,
                       maxfev: int = 400, config: CampaignConfig | None = None) -> SampleRecord:
    """Search perturbation directions for the largest ``|H(sigma) - H(rho)| / bound``.

    ``rho`` and the mixing partner ``tau`` are both free (Ginibre factors, or
    softmax tables when ``classical``); ``sigma = (1-t) rho + t tau`` with
    ``t`` chosen so the distance equals ``eps`` where possible.  The bound is
    evaluated at the realized distance.  Nelder-Mead with ``restarts`` seeded
    starts; the result is reported, never asserted.
    """
    order = as_order(order)
    dims = _tuple_dims([dims])[0]
    d_A, d_B = dims
    n = d_A * d_B
    config = config or CampaignConfig(dims=(dims,), orders=(order.value,), samples_per_cell=1)
    check = ("thm1-classical" if classical else "thm1") if order.value < 1 else ("thm3-hmin" if order.is_infinite else "cor1")
    if eps == 0.0:
        return SampleRecord(-1, 0, check, int(seed), dims, _order_label(order), 0.0, 0.0, None, None, 0.0, 0.0, 0.0,
                            STATUS_PASS, {"ratio": None, "sentinel": "ratio undefined at eps = 0"})
    bounds._check_eps(eps)

    def states(x):
        if classical:
            k = n
            p = np.exp(x[:k] - x[:k].max())
            t = np.exp(x[k:] - x[k:].max())
            return make_cq_state((p / p.sum()).reshape(d_A, d_B)).matrix, np.diag(t / t.sum()).astype(np.complex128)
        k = 2 * n * n
        return _from_params(x[:k], n), _from_params(x[k:], n)

    def evaluate(x):
        r, tau = states(x)
        rho = BipartiteState(r, d_A, d_B, classical_A=classical, classical_B=classical)
        dist = ops.trace_distance(r, tau)
        t = 1.0 if dist <= eps else eps / dist
        sigma = rho.with_matrix((1.0 - t) * r + t * tau)
        realized = ops.trace_distance(r, sigma.matrix)
        if classical:
            hr, sr, cr = _classical_entropy(rho, order)
            hs, ss, cs = _classical_entropy(sigma, order)
        else:
            hr, sr, cr = _entropy(rho, order, config)
            hs, ss, cs = _entropy(sigma, order, config)
        bound = continuity_bound(check, min(realized, eps), d_A, order)
        diff = abs(hs - hr)
        ratio = diff / bound if bound > 0 else 0.0
        return ratio, (realized, sr, ss, diff, bound, cr and cs)

    rng = make_rng(seed)
    dim_x = 2 * n if classical else 4 * n * n
    best = None
    for _ in range(max(int(restarts), 1)):
        x0 = rng.standard_normal(dim_x)
        res = minimize(lambda x: -evaluate(x)[0], x0, method="Nelder-Mead",
                       options={"maxfev": int(maxfev), "xatol": 1e-6, "fatol": 1e-9})
        if best is None or res.fun < best.fun:
            best = res
    ratio, (realized, sr, ss, diff, bound, conv) = evaluate(best.x)
    margin = bound - diff
    return SampleRecord(-1, 0, check, int(seed), dims, _order_label(order), float(eps), realized, sr, ss, diff, bound,
                        margin, _status(margin, conv, 1e-6), {"ratio": ratio, "restarts": int(restarts),
                                                              "evaluations": int(best.nfev)})


def format_summary(report: CampaignReport) -> str:
    """Human-readable per-cell table (for stderr)."""
    lines = [f"{'cell':>5} {'check':<16} {'dims':<7} {'order':<7} {'eps':<6} {'n':>4} {'viol':>4} {'unc':>4} min_margin"]
    for c in report.cells:
        mm = c["min_margin"]
        lines.append(f"{c['cell']:>5} {c['check']:<16} {str(tuple(c['dims'])):<7} {str(c['order']):<7} "
                     f"{'' if c['epsilon'] is None else c['epsilon']:<6} {c['count']:>4} {c['violations']:>4} "
                     f"{c['uncertain']:>4} {'n/a' if mm is None else f'{mm:.3e}'}"
                     + (f" {c['variant']}" if c.get("variant") else ""))
    lines.append(f"records={len(report.records)} violations={report.violations} uncertain={report.uncertain} "
                 f"({100 * report.uncertain_rate:.2f}%) min_margin={report.min_margin:.3e} "
                 f"{'PASS' if report.passed else 'FAIL'} elapsed={report.elapsed:.1f}s")
    return "\n".join(lines)
