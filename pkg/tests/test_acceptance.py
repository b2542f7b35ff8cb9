"""End-to-end acceptance checks.

Each test prints a single ``ACCEPTANCE <k>: PASS|FAIL`` line (bypassing
capture) before asserting, so a full run yields one status line per
criterion with its measured tolerance and runtime.
"""

import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from conftest import BENCH_SETS, random_design
from oracles import scalar_ou_imspe
from oudesign.cli import main as cli_main
from oudesign.entropy import (
    arbitrate_determinant,
    entropy,
    logdet_C_closed,
    logdet_C_oracle,
    optimize_entropy_check,
)
from oudesign.imspe import imspe_closed, imspe_quadrature, mspe_point
from oudesign.model import Design, OuParams, equispaced, simulate
from oudesign.optimize import (
    REFERENCE_EFFICIENCY_PCT,
    OptimizerConfig,
    efficiency_table,
    optimize_design,
)
from oudesign.polar import estimate_ou, PolarMotionSeries


def _report(capfd, num, ok, detail):
    with capfd.disabled():
        print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)


class TestAcceptance:
    def test_01_closed_form_matches_quadrature(self, capfd):
        rng = np.random.default_rng(20260823)
        started = time.perf_counter()
        worst = 0.0
        for _ in range(500):
            n = int(rng.integers(2, 9))
            d = random_design(rng, n)
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            closed = imspe_closed(d, p).value
            quad = imspe_quadrature(d, p, 1e-9)
            worst = max(worst, abs(closed - quad) / abs(closed))
        elapsed = time.perf_counter() - started
        ok = worst < 1e-6 and elapsed < 60
        _report(
            capfd, 1,
            ok,
            f"500 random cases, worst relative gap {worst:.2e} "
            f"(tol 1e-6), {elapsed:.1f}s (limit 60s)",
        )
        assert worst < 1e-6
        assert elapsed < 60

    def test_02_benchmark_efficiency_table(self, capfd):
        params = {label: OuParams(lam, om) for label, lam, om in BENCH_SETS}
        cfg = OptimizerConfig(n_starts=8, seed=0)
        deviations = {}
        for label, p in params.items():
            for rep in efficiency_table([p], [3, 4, 5], cfg):
                ref = REFERENCE_EFFICIENCY_PCT[(rep.n, label)]
                deviations[(label, rep.n)] = (
                    rep.relative_efficiency_pct,
                    ref,
                    rep.relative_efficiency_pct - ref,
                )
        outside = {
            k: v for k, v in deviations.items() if abs(v[2]) > 1.0
        }
        detail = "all 9 cells within 1 pp of reference"
        if outside:
            items = "; ".join(
                f"{label} n={n}: computed {got:.2f}% vs reference {ref:.2f}%"
                for (label, n), (got, ref, _) in sorted(outside.items())
            )
            detail = f"{len(outside)}/9 cells outside 1 pp tolerance: {items}"
        _report(capfd, 2, not outside, detail)
        assert not outside, detail

    def test_03_three_point_optimum_at_midpoint(self, capfd):
        from scipy.optimize import minimize_scalar

        started = time.perf_counter()
        worst = 0.0
        for lam in np.linspace(0.5, 5, 10):
            for om in np.linspace(-6, 6, 10):
                p = OuParams(float(lam), float(om))
                res = minimize_scalar(
                    lambda dd: imspe_closed(Design([0.0, dd, 1.0]), p).value,
                    bounds=(0.01, 0.99),
                    method="bounded",
                    options={"xatol": 1e-7},
                )
                worst = max(worst, abs(res.x - 0.5))
        elapsed = time.perf_counter() - started
        ok = worst < 1e-4 and elapsed < 30
        _report(
            capfd, 3,
            ok,
            f"10x10 grid, max |argmin - 0.5| = {worst:.2e} "
            f"(tol 1e-4), {elapsed:.1f}s (limit 30s)",
        )
        assert worst < 1e-4
        assert elapsed < 30

    def test_04_four_point_improvement_witness(self, capfd):
        p = OuParams(2.4522, -4.1274)
        d_opt, val_opt, _ = optimize_design(4, p, OptimizerConfig(n_starts=16, seed=0))
        val_eq = imspe_closed(equispaced(4), p).value
        improvement_pct = 100.0 * (val_eq - val_opt) / val_eq
        ok = improvement_pct > 1.0
        _report(
            capfd, 4,
            ok,
            f"optimal design improves on equispaced by {improvement_pct:.4f}% "
            f"(needs > 1%); optimal IMSPE {val_opt:.9f}, equispaced {val_eq:.9f}, "
            f"optimal points {np.array2string(d_opt.points, precision=6)}",
        )
        assert improvement_pct > 1.0

    def test_05_entropy_suite(self, capfd):
        rng = np.random.default_rng(5)
        worst_logdet = 0.0
        for _ in range(200):
            d = random_design(rng, int(rng.integers(2, 9)))
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            worst_logdet = max(
                worst_logdet, abs(logdet_C_closed(d, p) - logdet_C_oracle(d, p))
            )
        dominated = True
        for n in range(3, 9):
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            best = entropy(equispaced(n), p).value
            for _ in range(1000):
                if entropy(random_design(rng, n), p).value > best + 1e-12:
                    dominated = False
        worst_opt = 0.0
        for n in (3, 5, 7):
            d = optimize_entropy_check(n, OuParams(2.4522, -4.1274))
            worst_opt = max(worst_opt, float(np.abs(d.gaps - 1.0 / (n - 1)).max()))
        ok = worst_logdet < 1e-10 and dominated and worst_opt < 1e-6
        _report(
            capfd, 5,
            ok,
            f"logdet closed-vs-oracle max gap {worst_logdet:.2e} (tol 1e-10); "
            f"equispaced dominates 1000 random designs at each n in 3..8: {dominated}; "
            f"optimizer gap deviation {worst_opt:.2e} (tol 1e-6)",
        )
        assert worst_logdet < 1e-10
        assert dominated
        assert worst_opt < 1e-6

    def test_06_determinant_arbitration(self, capfd):
        rng = np.random.default_rng(6)
        all_squared = True
        worst = 0.0
        for _ in range(50):
            d = random_design(rng, int(rng.integers(2, 8)))
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            arb = arbitrate_determinant(d, p)
            all_squared &= arb.matching_form == "squared"
            worst = max(worst, arb.squared_deviation)
            # shipped closed form is the arbitration winner
            all_squared &= abs(logdet_C_closed(d, p) - arb.squared_form) < 1e-13
        _report(
            capfd, 6,
            all_squared and worst < 1e-10,
            f"product of (1 - pi^2)^2 matches the factorization oracle on 50 "
            f"random designs, max deviation {worst:.2e} (tol 1e-10); the "
            f"alternative product of (1 - 2 pi^2) never matches and is "
            f"report-only",
        )
        assert all_squared
        assert worst < 1e-10

    def test_07_zero_frequency_decoupling(self, capfd):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(50):
            d = random_design(rng, int(rng.integers(2, 8)))
            lam = rng.uniform(0.5, 5)
            closed = imspe_closed(d, OuParams(lam, 0.0)).value
            scalar = 2.0 * scalar_ou_imspe(d.points, lam)
            worst = max(worst, abs(closed - scalar) / abs(closed))
        _report(
            capfd, 7,
            worst < 1e-6,
            f"omega=0 IMSPE vs twice the scalar bordered-matrix quadrature, "
            f"worst relative gap {worst:.2e} (tol 1e-6) on 50 random designs",
        )
        assert worst < 1e-6

    def test_08_interpolation_at_design_points(self, capfd):
        rng = np.random.default_rng(8)
        worst = 0.0
        for _ in range(100):
            d = random_design(rng, int(rng.integers(2, 8)))
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            for t in d.points:
                worst = max(worst, abs(mspe_point(float(t), d, p)))
        _report(
            capfd, 8,
            worst < 1e-9,
            f"max |MSPE at a design point| = {worst:.2e} (tol 1e-9) "
            f"over 100 random designs",
        )
        assert worst < 1e-9

    def test_09_estimation_round_trip(self, capfd):
        started = time.perf_counter()
        dt, n_steps, reps = 0.05, 2000, 100
        t = np.arange(n_steps) * dt
        details = []
        ok = True
        for label, lam, om in BENCH_SETS:
            p = OuParams(lam, om, sigma=0.3)
            lam_hats, om_hats = [], []
            paths = simulate(p, t, seed=900 + hash(label) % 100, count=reps)
            for rep in range(reps):
                s = PolarMotionSeries(t + 2000.0, paths[rep, :, 0], paths[rep, :, 1])
                r = estimate_ou(s, dt)
                lam_hats.append(r.lambda_hat)
                om_hats.append(r.omega_hat)
            lam_hats, om_hats = np.array(lam_hats), np.array(om_hats)
            med_lam = float(np.median(np.abs(lam_hats - lam) / lam))
            med_om = float(np.median(np.abs(om_hats - om) / abs(om)))
            se_lam = lam_hats.std() / math.sqrt(reps)
            se_om = om_hats.std() / math.sqrt(reps)
            covered = (
                abs(lam_hats.mean() - lam) < 3 * se_lam
                and abs(om_hats.mean() - om) < 3 * se_om
            )
            ok &= med_lam < 0.10 and med_om < 0.10 and covered
            details.append(
                f"{label}: median rel err lambda {med_lam:.3f}, omega {med_om:.3f}, "
                f"3-SE coverage {covered}"
            )
        elapsed = time.perf_counter() - started
        ok &= elapsed < 120
        _report(
            capfd, 9,
            ok,
            "; ".join(details) + f"; {elapsed:.1f}s (limit 120s)",
        )
        assert ok

    def test_10_cli_determinism(self, capfd, tmp_path):
        runner = CliRunner()
        excerpt = tmp_path / "eop.txt"
        from pathlib import Path

        src = Path(__file__).parent.parent / "src" / "oudesign" / "data" / "eop_c01_excerpt.txt"
        excerpt.write_text(src.read_text())
        commands = {
            "imspe": ["imspe", "--n", "4", "--lambda", "2.4522", "--omega", "-4.1274", "--json"],
            "optimize": ["optimize", "--n", "4", "--lambda", "2.4522", "--omega", "-4.1274",
                         "--starts", "6", "--seed", "5"],
            "benchmark": ["benchmark", "--starts", "4", "--seed", "0"],
            "profile": ["profile", "--n", "3", "--lambda", "1", "--omega", "4", "--grid", "51"],
            "surface": ["surface", "--n", "3", "--lambda-count", "3", "--omega-count", "3"],
            "simulate": ["simulate", "--lambda", "2", "--omega", "-4", "--n-steps", "50",
                         "--seed", "9", "--count", "2"],
            "estimate": ["estimate", "--input", str(excerpt)],
        }
        mismatched = []
        for name, args in commands.items():
            outs = []
            for _ in range(2):
                r = runner.invoke(cli_main, args, catch_exceptions=False)
                assert r.exit_code == 0, f"{name} failed: {r.output}"
                outs.append(r.output)
            if outs[0] != outs[1]:
                mismatched.append(name)
        _report(
            capfd, 10,
            not mismatched,
            "byte-identical reruns for all 7 CLI commands"
            if not mismatched
            else f"non-deterministic output from: {', '.join(mismatched)}",
        )
        assert not mismatched
