import numpy as np
import pytest
from conftest import slowest_mode_rate

from crossdiff import (
    BoundaryMode,
    Cutoff,
    DegenerateInput,
    EdgeStoppingSpec,
    ImageGrid,
    InvarianceKind,
    Raw,
    Smoothed,
    SolverConfig,
    UnsupportedCombination,
    asymptotic_decay,
    check_invariance,
    format_report_table,
    new_pair,
    pair_from_arrays,
    preset,
)
from crossdiff.scalespace import report_rows

KAPPA10 = EdgeStoppingSpec(10.0)


def random_pair(key, shape=(24, 24), lo=0.0, hi=100.0):
    rng = np.random.Generator(np.random.Philox(key=key))
    return pair_from_arrays(rng.uniform(lo, hi, shape), rng.uniform(lo, hi, shape))


def config(pname="ncdf1", strategy=Raw(), boundary=BoundaryMode.REFLECT, dt=0.05):
    return SolverConfig(
        matrix=preset(pname).matrix,
        edge_stopping=KAPPA10,
        strategy=strategy,
        boundary=boundary,
        dt=dt,
    )


class TestGreyShift:
    def test_u_only_shift_commutes(self):
        pair = random_pair(80)
        rep = check_invariance(
            InvarianceKind.GREY_SHIFT, pair, config(), 100, shift=(50.0, 0.0)
        )
        assert rep.max_abs_deviation <= 1e-11
        assert rep.passed

    def test_u_only_shift_commutes_smoothed(self):
        pair = random_pair(81)
        rep = check_invariance(
            InvarianceKind.GREY_SHIFT,
            pair,
            config(strategy=Smoothed(1.5)),
            100,
            shift=(50.0, 0.0),
        )
        assert rep.max_abs_deviation <= 1e-11
        assert rep.passed

    def test_full_vector_shift_is_refused(self):
        pair = random_pair(82)
        for strategy in (Raw(), Cutoff(100.0), Smoothed(1.0)):
            with pytest.raises(UnsupportedCombination):
                check_invariance(
                    InvarianceKind.GREY_SHIFT,
                    pair,
                    config(strategy=strategy),
                    10,
                    shift=(50.0, 10.0),
                )


class TestReverseContrast:
    @pytest.mark.parametrize("pname", ["ncdf1", "ncdf5"])
    @pytest.mark.parametrize("strategy", [Raw(), Smoothed(1.5)], ids=["raw", "smoothed"])
    def test_negation_commutes(self, pname, strategy):
        pair = random_pair(83)
        rep = check_invariance(
            InvarianceKind.REVERSE_CONTRAST, pair, config(pname, strategy), 100
        )
        assert rep.max_abs_deviation <= 1e-11
        assert rep.passed

    def test_cutoff_is_refused(self):
        pair = random_pair(84)
        with pytest.raises(UnsupportedCombination):
            check_invariance(
                InvarianceKind.REVERSE_CONTRAST, pair, config(strategy=Cutoff(50.0)), 10
            )


class TestTranslation:
    def test_periodic_roll_commutes(self):
        pair = random_pair(85)
        rep = check_invariance(
            InvarianceKind.TRANSLATION,
            pair,
            config(boundary=BoundaryMode.PERIODIC),
            100,
            shift=(5, -3),
        )
        assert rep.max_abs_deviation <= 1e-11
        assert rep.passed

    def test_reflect_is_refused(self):
        pair = random_pair(86)
        with pytest.raises(UnsupportedCombination):
            check_invariance(InvarianceKind.TRANSLATION, pair, config(), 10, shift=(1, 0))


class TestAverageGrey:
    def test_zero_steps_deviation_is_exactly_zero(self):
        pair = random_pair(87)
        rep = check_invariance(InvarianceKind.AVERAGE_GREY, pair, config(), 0)
        assert rep.max_abs_deviation == 0.0
        assert rep.passed

    def test_means_preserved_along_run(self):
        pair = random_pair(88)
        rep = check_invariance(InvarianceKind.AVERAGE_GREY, pair, config("ncdf6"), 200)
        assert rep.max_abs_deviation <= 1e-11
        assert rep.passed


class TestAsymptoticDecay:
    def test_constant_pair_is_degenerate(self):
        grid = ImageGrid(8, 8)
        pair = new_pair(grid, np.full(64, 3.0), np.full(64, 5.0))
        with pytest.raises(DegenerateInput):
            asymptotic_decay(pair, config(), 10)

    def test_short_run_reports_inconclusive(self):
        pair = random_pair(89, shape=(32, 32), lo=0.0, hi=0.01)
        rep = asymptotic_decay(pair, config(), 200)
        assert not rep.passed
        assert "inconclusive" in rep.detail

    def test_long_run_decays_with_negative_log_linear_slope(self):
        # small amplitudes keep g within 1e-8 of 1 (linear regime)
        pair = random_pair(90, shape=(32, 32), lo=0.0, hi=0.01)
        rep = asymptotic_decay(pair, config(), 12000)
        assert rep.passed
        assert rep.max_abs_deviation < 1e-3
        assert rep.slope < 0.0

    def test_linear_regime_rate_matches_mode_oracle_within_ten_percent(self):
        # cutoff with a huge limit leaves w = v; tiny amplitudes make g
        # constant to 1e-8, so the decay rate is the linear scheme's. The
        # matrix is non-normal, so the transition to single-mode decay is
        # slow; fit the trailing quarter of a long run.
        pair = random_pair(91, shape=(16, 16), lo=0.0, hi=0.01)
        cfg = config(strategy=Cutoff(1e9))
        rep = asymptotic_decay(pair, cfg, 8000, fit_fraction=0.25)
        assert rep.passed
        oracle = slowest_mode_rate(
            preset("ncdf1").matrix.as_array(), (16, 16), cfg.dt, 1.0, cfg.boundary
        )
        assert rep.slope == pytest.approx(oracle, rel=0.10)

    def test_distance_to_mean_nonincreasing_under_stability_bound(self):
        pair = random_pair(92)
        traj_dist = None
        from crossdiff import run

        traj = run(pair, config("ncdf5"), 300)
        dists = [m.dist_to_mean for m in traj.monitors]
        assert all(dists[i + 1] <= dists[i] * (1 + 1e-12) for i in range(len(dists) - 1))


class TestReportSerialization:
    def test_rows_and_table(self):
        pair = random_pair(93)
        reports = [
            check_invariance(InvarianceKind.AVERAGE_GREY, pair, config(), 5),
            check_invariance(
                InvarianceKind.GREY_SHIFT, pair, config(), 5, shift=(10.0, 0.0)
            ),
        ]
        rows = report_rows(reports)
        assert rows[0] == ["kind", "deviation", "threshold", "pass"]
        assert rows[1][0] == "average-grey"
        assert rows[2][0] == "grey-shift"
        table = format_report_table(reports)
        assert "average-grey" in table and "grey-shift" in table
