"""Acceptance criteria 1-10, each at its stated tolerance.

Every test reports one ``[PASS]``/``[FAIL]`` line, printed in the terminal
summary under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from renyicont import bounds
from renyicont.entropy import (DEFAULT_CONFIG, conditional_entropy_up, hmin, renyi_entropy, solve_direct_search,
                               solve_fixed_point, solve_grid_oracle, von_neumann_conditional)
from renyicont.harness import (CLASSICAL_ORDER_TOL, DUALITY_SOFT_TOL, MCCARTHY_TOL, default_config, run_campaign,
                               run_classical_campaign)
from renyicont.states import make_cq_state, make_rng, product, random_density, random_table, sample_random_state

pytestmark = pytest.mark.slow

TIME_LIMIT = 600.0


def _converged(rec):
    return rec.status != "solver-uncertain"


def test_criterion_1_thm1_campaign(report_line):
    cfg = default_config("thm1")
    t0 = time.perf_counter()
    rep = run_campaign(cfg)
    elapsed = time.perf_counter() - t0
    bad = [r for r in rep.records if _converged(r) and r.margin < -1e-6]
    ok = not bad and rep.uncertain_rate <= 0.02 and elapsed <= TIME_LIMIT and len(rep.records) == 24000
    report_line(1, ok, f"{len(rep.records)} records, {len(bad)} below -1e-6, uncertain {rep.uncertain_rate:.2%}, "
                       f"min margin {rep.min_margin:.3e}, {elapsed:.0f}s")
    assert len(rep.records) == 24000
    assert not bad
    assert rep.uncertain_rate <= 0.02
    assert elapsed <= TIME_LIMIT


def test_criterion_2_classical_campaign(report_line):
    rep = run_classical_campaign(default_config("classical"))
    viol = [r for r in rep.records if r.check == "thm1-classical" and r.status == "violation"]
    order_bad = [r for r in rep.records
                 if r.extra["bound_low_classical"] > r.extra["bound_low"] + CLASSICAL_ORDER_TOL]
    tighter = {"thm1-classical": 0, "jabbour-datta": 0, "equal": 0}
    for c in rep.cells:
        if c["check"] == "thm1-classical":
            for k, v in c["tighter"].items():
                tighter[k] += v
    ok = not viol and not order_bad and rep.violations == 0
    report_line(2, ok, f"{len(rep.records)} records, {len(viol)} violations, {len(order_bad)} records with "
                       f"classical > general, tighter counts {tighter}")
    assert not viol and not order_bad
    assert rep.violations == 0


def test_criterion_3_cor1_campaign(report_line):
    rep = run_campaign(default_config("cor1"))
    viol = [r for r in rep.records if r.status == "violation"]
    inf_recs = [r for r in rep.records if r.order == "inf"]
    via_sdp = all(r.h_rho["solver"] == "sdp" for r in inf_recs)
    ok = not viol and via_sdp and inf_recs and rep.uncertain_rate <= 0.02
    report_line(3, ok, f"{len(rep.records)} records (alpha in 1.01,1.5,2,5,inf), {len(viol)} violations, "
                       f"uncertain {rep.uncertain_rate:.2%}, min margin {rep.min_margin:.3e}, inf via sdp: {via_sdp}")
    assert not viol
    assert inf_recs and via_sdp


def test_criterion_4_hmin_campaign(report_line):
    rep = run_campaign(default_config("thm3"))
    viol = [r for r in rep.records if r.status == "violation"]
    feas = max(max(r.h_rho["residual"], r.h_sigma["residual"]) for r in rep.records)
    ok = not viol and feas <= 1e-8 and rep.uncertain == 0
    report_line(4, ok, f"{len(rep.records)} records, {len(viol)} violations, max feasibility residual {feas:.1e}, "
                       f"min margin {rep.min_margin:.3e}")
    assert not viol and rep.uncertain == 0
    assert feas <= 1e-8


def test_criterion_5_duality(report_line):
    rep = run_campaign(default_config("duality"))
    conv = [r for r in rep.records if _converged(r)]
    res = np.array([r.difference for r in conv])
    frac = float(np.mean(res <= DUALITY_SOFT_TOL))
    worst = float(res.max())
    ok = len(rep.records) >= 500 and frac >= 0.99 and worst <= 1e-4
    report_line(5, ok, f"{len(rep.records)} states, {len(conv)} converged, {frac:.2%} within 1e-5, "
                       f"worst residual {worst:.1e}")
    assert len(rep.records) >= 500
    assert frac >= 0.99 and worst <= 1e-4


@pytest.fixture(scope="module")
def mccarthy_report():
    return run_campaign(default_config("mccarthy"))


def test_criterion_6_mccarthy(report_line, mccarthy_report):
    rep = mccarthy_report
    worst = min(r.margin for r in rep.records)
    at_one = max(r.extra["equality_gap"] for r in rep.records if r.order == "1.0")
    pairs = len(rep.records) // 5
    ok = worst >= -MCCARTHY_TOL and at_one <= 1e-10 and pairs >= 1000
    report_line("6a", ok, f"{pairs} pairs x 5 orders, min slack {worst:.1e} (tol 1e-8), "
                          f"alpha=1 equality gap {at_one:.1e}")
    assert pairs >= 1000
    assert worst >= -MCCARTHY_TOL
    assert at_one <= 1e-10


@pytest.mark.xfail(strict=True, reason="at alpha = 0, tr(P+Q)^0 = rank(P+Q) = d while tr P^0 + tr Q^0 = 2d "
                                       "for full-rank pairs, so the stated equality cannot hold")
def test_criterion_6_alpha_zero_equality(report_line, mccarthy_report):
    full = [r for r in mccarthy_report.records if r.order == "0.0" and r.extra["full_rank"]]
    gap = max(r.extra["equality_gap"] for r in full)
    # the equality does hold exactly when the supports add: rank(P+Q) = rank P + rank Q
    additive = [r for r in mccarthy_report.records if r.order == "0.0" and r.margin == 0.0]
    report_line("6b", gap <= 1e-10,
                f"alpha=0 full-rank equality: {len(full)} full-rank pairs, max gap {gap:.0f} (= d, "
                f"rank(P+Q) vs rank P + rank Q); equality seen only on {len(additive)} rank-additive pairs")
    assert full
    assert gap <= 1e-10


def test_criterion_7_dpi(report_line):
    rep = run_campaign(default_config("dpi"))
    per = {}
    for r in rep.records:
        ch = r.extra["channel"]
        n, w = per.get(ch, (0, math.inf))
        per[ch] = (n + 1, min(w, r.margin))
    worst = min(w for _, w in per.values())
    ok = all(n >= 500 for n, _ in per.values()) and worst >= -1e-7 and rep.violations == 0
    report_line(7, ok, "; ".join(f"{ch}: {n} triples, min decrease {w:.1e}" for ch, (n, w) in per.items()))
    assert all(n >= 500 for n, _ in per.values())
    assert worst >= -1e-7


def test_criterion_8_alpha_to_one(report_line):
    diffs = []
    for i in range(100):
        s = sample_random_state(2, 2, "hilbert-schmidt", 80_000 + i)
        diffs.append(abs(conditional_entropy_up(s, 0.9999).value - von_neumann_conditional(s)))
    grid = [abs(bounds.bound_low(e, d, 1 - 1e-6) - bounds.afw_von_neumann(e, d))
            for e in np.linspace(0.0, 1.0, 20) for d in (1, 2, 4, 8)]
    ok = max(diffs) <= 5e-3 and max(grid) <= 1e-4
    report_line(8, ok, f"max |H_0.9999 - H| = {max(diffs):.1e} over 100 states; "
                       f"max bound gap {max(grid):.1e} over 20x4 grid")
    assert max(diffs) <= 5e-3
    assert len(grid) == 80 and max(grid) <= 1e-4


def test_criterion_9_solver_oracles(report_line):
    cfg = DEFAULT_CONFIG
    grid_gap = ds_gap = 0.0
    for i in range(200):
        s = sample_random_state(2 + i % 2, 2, "hilbert-schmidt", 90_000 + i)
        for a in (0.5, 0.75, 2.0):
            fp = solve_fixed_point(s, a, cfg)
            assert fp.converged
            grid_gap = max(grid_gap, abs(fp.value - solve_grid_oracle(s, a, cfg).value))
            ds_gap = max(ds_gap, abs(fp.value - solve_direct_search(s, a, cfg).value))
    # single-qubit inputs: near-pure marginals put the optimizer near the Bloch sphere,
    # where the 201^3 lattice is coarsest; reported, not gated
    trivial_gap = 0.0
    for i in range(60):
        s = sample_random_state(1, 2, "hilbert-schmidt", 95_000 + i)
        for a in (0.5, 0.75, 2.0):
            trivial_gap = max(trivial_gap, abs(solve_fixed_point(s, a, cfg).value
                                               - solve_grid_oracle(s, a, cfg).value))
    prod_gap = 0.0
    rng = make_rng(9)
    for i in range(30):
        d_a = 2 + i % 3
        ra, rb = random_density(d_a, rng, "hilbert-schmidt"), random_density(2, rng, "hilbert-schmidt")
        st = product(ra, rb)
        for a in (0.5, 0.75, 2.0):
            prod_gap = max(prod_gap, abs(conditional_entropy_up(st, a).value - renyi_entropy(ra, a)))
    ok = grid_gap <= 1e-3 and ds_gap <= 1e-5 and prod_gap <= 1e-6
    report_line(9, ok, f"200 states (d_A 2,3; d_B 2) x 3 orders: fp-grid {grid_gap:.1e}, fp-direct {ds_gap:.1e}; "
                       f"product states {prod_gap:.1e}; d_A=1 fp-grid {trivial_gap:.1e} (lattice-limited)")
    assert grid_gap <= 1e-3
    assert ds_gap <= 1e-5
    assert prod_gap <= 1e-6


def test_criterion_10_hmin_cq(report_line):
    rng = make_rng(10)
    worst = 0.0
    for i in range(100):
        d_a, d_b = (int(k) for k in rng.integers(1, 5, size=2))
        table = random_table(d_a, d_b, rng, sparsity=0.3 if i % 4 == 0 else 0.0)
        exact = -math.log2(table.max(axis=0).sum())
        worst = max(worst, abs(hmin(make_cq_state(table)).value - exact))
    report_line(10, worst <= 1e-7, f"100 cq tables (d_A, d_B <= 4), max |sdp - closed form| = {worst:.1e}")
    assert worst <= 1e-7
