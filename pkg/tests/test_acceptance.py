"""End-to-end acceptance criteria; each test prints one PASS/FAIL line."""

import csv
import json
import time

import numpy as np

from coherence_engine import reports
from coherence_engine.cli import run
from coherence_engine.engine_cycle import EngineOperatingPoint, cycle_performance
from coherence_engine.jc_charging import effective_bath_dimension
from coherence_engine.optimizer import SweepGrid, optimal_per_n

REPORTED_OPTIMUM = (1.57, 11.22)


def verdict(number, passed, detail):
    print(f"\nCRITERION {number}: {'PASS' if passed else 'FAIL'} | {detail}")
    assert passed, detail


def summarize(checks):
    return "; ".join(f"{c.name}={c.residual:.3g} (tol {c.tolerance:g})" for c in checks)


def test_criterion_1_observation1():
    start = time.perf_counter()
    checks = reports.observation1_checks(seed=0, samples=50)
    elapsed = time.perf_counter() - start
    ok = all(c.passed for c in checks) and elapsed <= 30
    verdict(1, ok, f"{summarize(checks)}; {elapsed:.1f}s")


def test_criterion_2_observation2():
    start = time.perf_counter()
    checks = reports.observation2_checks(seed=0, draws=10, n_values=(2, 3))
    elapsed = time.perf_counter() - start
    ok = all(c.passed for c in checks) and elapsed <= 120
    verdict(2, ok, f"{summarize(checks)}; {elapsed:.1f}s")


def test_criterion_3_oracle_equivalence():
    checks = reports.oracle_checks(reports.ORACLE_BETAS, reports.ORACLE_GTS)
    on, off = checks
    detail = f"max trace distance (prefactor on) {on.residual:.3g}; min gap (prefactor off, beta>=3) {off.tolerance - off.residual:.3g}"
    verdict(3, on.passed and off.passed, detail)


def test_criterion_4_conservation_and_rates():
    checks = reports.conservation_checks() + reports.rate_identity_checks(seed=0, samples=10)
    verdict(4, all(c.passed for c in checks), summarize(checks))


def test_criterion_5_truncation():
    d1, d05 = effective_bath_dimension(1.0, 1e-8), effective_bath_dimension(0.5, 1e-8)
    checks = reports.truncation_checks(1e-8)
    gap = next(c for c in checks if c.name == "truncated_series_within_acc")
    ok = d1 == 17 and d05 == 35 and gap.passed
    verdict(5, ok, f"d*(1)={d1}, d*(0.5)={d05}, max |delta_d* - delta_d*+200|={gap.residual:.3g}")


def test_criterion_6_efficiency_bounds():
    checks = reports.efficiency_checks(SweepGrid(), n_values=(2, 4))
    verdict(6, all(c.passed for c in checks), summarize(checks))


def test_criterion_7_reported_optimum():
    start = time.perf_counter()
    row = optimal_per_n(4, "efficiency", n_values=[4])[0]
    elapsed = time.perf_counter() - start
    at_reported = cycle_performance(EngineOperatingPoint(4, *REPORTED_OPTIMUM)).eta
    db = abs(row.best_point[0] - REPORTED_OPTIMUM[0])
    dg = abs(row.best_point[1] - REPORTED_OPTIMUM[1])
    rel = abs(row.best_value - at_reported) / at_reported
    ok = db <= 0.1 and dg <= 0.5 and rel <= 0.01 and elapsed <= 600
    detail = (
        f"optimum ({row.best_point[0]:.4f}, {row.best_point[1]:.4f}) eta={row.best_value:.6f}; "
        f"reported point eta={at_reported:.6f}; |dbeta|={db:.3f}, |dgt|={dg:.3f}, rel={rel:.3%}; {elapsed:.1f}s"
    )
    verdict(7, ok, detail)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_criterion_8_figure_datasets(tmp_path):
    fig2 = tmp_path / "fig2.csv"
    fig6 = tmp_path / "fig6.csv"
    assert run(["figure", "--name", "fig2", "--out", str(fig2)]) == 0
    assert run(["figure", "--name", "fig6", "--out", str(fig6)]) == 0

    by_beta = {}
    for r in _rows(fig2):
        beta = float(r["beta_omega0"])
        by_beta[beta] = max(by_beta.get(beta, 0.0), float(r["c_ext_s"]))
    betas = sorted(by_beta)
    hot, cold = by_beta[0.01], by_beta[20.0]
    in_range = [by_beta[b] for b in betas if b <= 3.0]
    k = int(np.argmax(in_range))
    interior = 0 < k < len(in_range) - 1

    worst_match = 0.0
    swing = {"ground": 0.0, "kappa": 0.0}
    for r in _rows(fig6):
        evolved = float(r["rho00_evolved"])
        worst_match = max(worst_match, abs(float(r["rho00_closed_form"]) - evolved), abs(float(r["rho00_series"]) - evolved))
        swing[r["case"]] = max(swing[r["case"]], abs(evolved - float(r["rho00_initial"])))

    ok = hot < 0.02 and cold < 0.02 and interior and worst_match <= 1e-8 and min(swing.values()) > 0.05
    detail = (
        f"max_gt C_ext at beta=0.01: {hot:.4g}, at beta=20: {cold:.3g} (need < 0.02); "
        f"interior maximum at beta={betas[k]:.4f} ({interior}); "
        f"populations vs evolution {worst_match:.3g}; swings ground={swing['ground']:.3f} kappa={swing['kappa']:.3f}"
    )
    verdict(8, ok, detail)


def test_criterion_9_n_curves(tmp_path):
    start = time.perf_counter()
    fig3, fig5 = tmp_path / "fig3.csv", tmp_path / "fig5.csv"
    codes = [run(["figure", "--name", name, "--out", str(path)]) for name, path in (("fig3", fig3), ("fig5", fig5))]
    elapsed = time.perf_counter() - start
    agreement = json.loads((tmp_path / "fig5.csv.agreement.json").read_text())
    n_values = sorted({int(r["N"]) for r in _rows(fig5)})
    bench_n = sorted({int(r["N"]) for r in _rows(fig3) if r["panel"] == "benchmark"})
    ok = (
        codes == [0, 0]
        and agreement["internally_consistent"]
        and n_values == list(range(1, 11))
        and bench_n == list(range(1, 11))
        and elapsed <= 1200
    )
    detail = (
        f"consistency residual {agreement['internal_consistency_residual']:.3g}; "
        f"claim N=4 -> benchmark argmax {agreement['benchmark_argmax_n']}, "
        f"efficiency argmax N={agreement['efficiency_argmax_n']} (agrees: {agreement['efficiency_agrees']}); {elapsed:.0f}s"
    )
    verdict(9, ok, detail)


def test_criterion_10_determinism(tmp_path):
    outputs = {}
    for name, argv in (("sweep", ["sweep", "--objective", "eta", "--n", "4"]), ("verify", ["verify", "--suite", "all", "--seed", "0"])):
        for k in range(2):
            path = tmp_path / f"{name}{k}"
            run(argv + ["--out", str(path)])
            outputs.setdefault(name, []).append(path.read_bytes())
    same = {name: pair[0] == pair[1] and len(pair[0]) > 0 for name, pair in outputs.items()}
    verdict(10, all(same.values()), f"byte-identical: {same}")
