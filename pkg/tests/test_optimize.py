import numpy as np
import pytest

from conftest import BENCH_SETS, random_design
from oudesign.errors import ValidationError
from oudesign.imspe import imspe_closed
from oudesign.model import OuParams, equispaced
from oudesign.optimize import (
    EfficiencyReport,
    OptimizerConfig,
    efficiency_table,
    gaps_from_raw,
    imspe_surface,
    mspe_profile,
    optimize_design,
)


class TestEquispaced:
    def test_small_sizes(self):
        np.testing.assert_allclose(equispaced(2).points, [0.0, 1.0])
        np.testing.assert_allclose(equispaced(3).points, [0.0, 0.5, 1.0])
        np.testing.assert_allclose(equispaced(5).gaps, 0.25)

    def test_too_small(self):
        with pytest.raises(ValidationError):
            equispaced(1)


class TestGapParameterization:
    def test_simplex_feasibility(self, rng):
        for _ in range(200):
            g = gaps_from_raw(rng.normal(scale=3, size=int(rng.integers(1, 7))))
            assert np.all(g > 0)
            assert abs(g.sum() - 1.0) < 1e-12

    def test_zero_maps_to_equal_gaps(self):
        np.testing.assert_allclose(gaps_from_raw(np.zeros(3)), 0.25)


class TestOptimizeDesign:
    def test_three_point_imspe_optimum(self):
        d, val, trace = optimize_design(3, OuParams(1.0, 4.0), OptimizerConfig(n_starts=4))
        assert abs(d.points[1] - 0.5) < 1e-4
        assert val == pytest.approx(imspe_closed(d, OuParams(1.0, 4.0)).value)
        assert len(trace) == 4

    def test_n2_forced(self):
        d, _, _ = optimize_design(2, OuParams(1.0, 1.0))
        np.testing.assert_allclose(d.points, [0.0, 1.0])

    def test_entropy_criterion_equispaced(self):
        cfg = OptimizerConfig(criterion="entropy", n_starts=6)
        for n in (3, 6):
            d, _, _ = optimize_design(n, OuParams(2.0, 3.0), cfg)
            assert np.abs(d.gaps - 1.0 / (n - 1)).max() < 1e-6

    def test_never_worse_than_equispaced(self, rng):
        for _ in range(3):
            p = OuParams(rng.uniform(0.5, 5), rng.uniform(-6, 6))
            n = int(rng.integers(3, 6))
            _, val, _ = optimize_design(n, p, OptimizerConfig(n_starts=4, seed=1))
            assert val <= imspe_closed(equispaced(n), p).value + 1e-9

    def test_seed_determinism(self):
        cfg = OptimizerConfig(n_starts=6, seed=42)
        a = optimize_design(4, OuParams(2.4522, -4.1274), cfg)
        b = optimize_design(4, OuParams(2.4522, -4.1274), cfg)
        np.testing.assert_array_equal(a[0].points, b[0].points)
        assert a[1] == b[1]

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            OptimizerConfig(n_starts=0)
        with pytest.raises(ValidationError):
            OptimizerConfig(criterion="maximin")


class TestEfficiencyTable:
    def test_report_bounds_and_n3_rows(self):
        params = [OuParams(lam, om) for _, lam, om in BENCH_SETS]
        reports = efficiency_table(params, [3], OptimizerConfig(n_starts=4))
        assert len(reports) == 3
        for r in reports:
            assert 0 < r.relative_efficiency_pct <= 100 + 1e-6
            assert r.relative_efficiency_pct == pytest.approx(100.0, abs=0.01)

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValidationError):
            efficiency_table([], [3])

    def test_report_invariant(self):
        with pytest.raises(ValidationError):
            EfficiencyReport(
                n=3,
                params=OuParams(1, 1),
                imspe_optimal=2.0,
                imspe_equispaced=1.0,
                optimal_design=equispaced(3),
            )


class TestProfilesAndSurface:
    def test_profile_zero_at_design_points(self):
        d = equispaced(3)
        rows = mspe_profile(d, OuParams(1.0, 4.0), 201)
        by_x = dict(rows)
        for t in d.points:
            assert abs(by_x[float(t)]) < 1e-9

    def test_profile_grid_validation(self):
        with pytest.raises(ValidationError):
            mspe_profile(equispaced(3), OuParams(1, 1), 1)

    def test_surface_omega_symmetry(self):
        lam_grid = np.linspace(0.5, 5, 4)
        om_grid = np.array([-4.0, -1.0, 1.0, 4.0])
        rows = imspe_surface(3, lam_grid, om_grid)
        table = {(r[0], r[1]): r[2] for r in rows}
        for lam in lam_grid:
            for om in (1.0, 4.0):
                assert table[(lam, om)] == pytest.approx(table[(lam, -om)], rel=1e-12)

    def test_surface_row_major_order(self):
        rows = imspe_surface(3, [1.0, 2.0], [0.5, 1.5])
        assert [(r[0], r[1]) for r in rows] == [
            (1.0, 0.5),
            (1.0, 1.5),
            (2.0, 0.5),
            (2.0, 1.5),
        ]
