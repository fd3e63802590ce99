"""Tests for the Monte Carlo driver, baselines, config files, and CSV."""

import json

import numpy as np
import pytest

from csmimo.csmux import MuxConfig, identity_phi
from csmimo.harness import (
    CSV_HEADER,
    ExperimentSpec,
    SweepRow,
    load_spec,
    parse_snr_grid,
    run_baseline_overload,
    run_baseline_zf,
    run_sweep,
    run_trial,
    spec_from_dict,
    throughput_proxy,
    wilson_interval,
)

INF = float("inf")


def small_spec(**kw):
    defaults = dict(
        config=MuxConfig(nt=4, nr=4, l=8, j=2, phi_seed=880),
        snr_db=(10.0,),
        trials=100,
        master_seed=5,
    )
    defaults.update(kw)
    return ExperimentSpec(**defaults)


class TestRunTrial:
    def test_deterministic(self):
        spec = small_spec()
        a = run_trial(spec, 3, snr_db=10.0)
        b = run_trial(spec, 3, snr_db=10.0)
        np.testing.assert_array_equal(a.tx_bits, b.tx_bits)
        np.testing.assert_array_equal(a.rx_bits, b.rx_bits)
        assert a.bit_errors == b.bit_errors

    def test_noiseless_trial_is_exact(self):
        spec = small_spec()
        for t in range(50):
            rec = run_trial(spec, t, snr_db=INF)
            assert rec.bit_errors == 0
            assert rec.symbol_errors == 0

    def test_2x2_l4_setup_runs(self):
        spec = small_spec(config=MuxConfig(nt=2, nr=2, l=4, j=2, phi_seed=3262))
        rec = run_trial(spec, 0, snr_db=INF)
        assert rec.bits == 8
        assert rec.bit_errors == 0

    def test_common_randomness_across_snr(self):
        """The same trial index reuses bits and channel at every SNR point."""
        spec = small_spec()
        a = run_trial(spec, 11, snr_db=0.0)
        b = run_trial(spec, 11, snr_db=20.0)
        np.testing.assert_array_equal(a.tx_bits, b.tx_bits)

    def test_negative_trial_index_rejected(self):
        with pytest.raises(ValueError):
            run_trial(small_spec(), -1)


class TestExperimentSpec:
    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError, match="trials"):
            small_spec(trials=0)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="grid"):
            small_spec(snr_db=())

    def test_unknown_solver_rejected(self):
        with pytest.raises(ValueError, match="solver"):
            small_spec(solver="genie")

    def test_unknown_baseline_rejected(self):
        with pytest.raises(ValueError, match="baseline"):
            small_spec(baseline="mmse")

    def test_notation(self):
        assert small_spec().notation == "(4,4)-8"

    def test_grid_sorted(self):
        spec = small_spec(snr_db=(10.0, 0.0, 4.0))
        assert spec.snr_db == (0.0, 4.0, 10.0)

    def test_streams_accounting(self):
        assert small_spec().streams == 8
        assert small_spec(baseline="zf").streams == 4
        assert small_spec(baseline="overload").streams == 8


class TestRunSweep:
    def test_noiseless_rows_are_zero(self):
        spec = small_spec(snr_db=(INF,), trials=80)
        result = run_sweep(spec)
        assert result.rows[0].ber == 0.0
        assert result.rows[0].ser == 0.0
        assert result.rows[0].trials == 80

    def test_early_stop_on_errors(self):
        spec = small_spec(snr_db=(-10.0,), trials=5000, early_stop_errors=50)
        row = run_sweep(spec).rows[0]
        assert row.trials < 5000
        assert row.bit_errors >= 50

    def test_monotone_trend_with_ci_overlap(self):
        """BER does not significantly increase along the grid."""
        spec = small_spec(snr_db=(0.0, 6.0, 12.0, 18.0), trials=1500,
                          early_stop_errors=0)
        rows = run_sweep(spec).rows
        for lo, hi in zip(rows, rows[1:]):
            assert hi.ber <= lo.ber or hi.ci_low <= lo.ci_high

    def test_reproducible_csv_bytes(self):
        spec = small_spec(snr_db=(0.0, 10.0), trials=300)
        assert run_sweep(spec).to_csv() == run_sweep(spec).to_csv()

    def test_csv_header_exact(self, tmp_path):
        spec = small_spec(trials=20)
        out = tmp_path / "r.csv"
        run_sweep(spec).write_csv(out)
        lines = out.read_text().splitlines()
        data_header = [l for l in lines if not l.startswith("#")][0]
        assert data_header == CSV_HEADER
        assert CSV_HEADER == (
            "snr_db,trials,bits,bit_errors,ber,sym_errors,ser,"
            "throughput,ci_low,ci_high"
        )

    def test_rows_sorted_by_snr(self):
        spec = small_spec(snr_db=(12.0, 0.0, 6.0), trials=30)
        rows = run_sweep(spec).rows
        assert [r.snr_db for r in rows] == [0.0, 6.0, 12.0]


class TestBaselines:
    def test_zf_equivalence_with_identity_compression(self):
        """rho = 1 with identity blocks makes the full pipeline reproduce the
        plain ZF baseline decisions trial by trial."""
        cfg = MuxConfig(nt=4, nr=4, l=4, j=4, phi_seed=1)
        spec = small_spec(config=cfg)
        zf_spec = small_spec(config=cfg, baseline="zf")
        phi = identity_phi(cfg)
        for t in range(300):
            cs = run_trial(spec, t, snr_db=10.0, phi=phi)
            zf = run_trial(zf_spec, t, snr_db=10.0)
            np.testing.assert_array_equal(cs.tx_bits, zf.tx_bits)
            np.testing.assert_array_equal(cs.rx_bits, zf.rx_bits)

    def test_overload_fails_even_noiseless(self):
        """Recovering, say, 8 streams from 4 observations cannot work."""
        spec = small_spec(baseline="overload", snr_db=(INF,), trials=200)
        row = run_sweep(spec).rows[0]
        assert row.ber > 0.1

    def test_overload_with_square_system_reduces_to_zf(self):
        cfg = MuxConfig(nt=4, nr=4, l=4, j=4, phi_seed=1)
        over = small_spec(config=cfg, baseline="overload")
        zf = small_spec(config=cfg, baseline="zf")
        for t in range(200):
            a = run_trial(over, t, snr_db=10.0)
            b = run_trial(zf, t, snr_db=10.0)
            np.testing.assert_array_equal(a.rx_bits, b.rx_bits)

    def test_baseline_helpers(self):
        spec = small_spec(snr_db=(INF,), trials=30)
        assert run_baseline_zf(spec).rows[0].ber == 0.0
        assert run_baseline_overload(spec).rows[0].ber > 0.0


class TestThroughputAndCi:
    def test_throughput_extremes(self):
        spec = small_spec()
        row = SweepRow(20.0, 1, 16, 0, 0.0, 0, 0.0, 0.0, 0.0, 0.0)
        assert throughput_proxy(row, spec) == pytest.approx(16.0)
        row = SweepRow(20.0, 1, 16, 16, 1.0, 8, 1.0, 0.0, 0.0, 0.0)
        assert throughput_proxy(row, spec) == pytest.approx(0.0)

    def test_throughput_20x20(self):
        spec = small_spec(config=MuxConfig(nt=20, nr=20, l=40, j=10, phi_seed=880))
        row = SweepRow(20.0, 1, 80, 0, 0.0, 0, 0.0, 0.0, 0.0, 0.0)
        assert throughput_proxy(row, spec) == pytest.approx(80.0)

    def test_wilson_matches_quadratic_roots(self):
        """The interval endpoints solve (p - p_hat)^2 n = z^2 p (1 - p)."""
        z = 1.959963984540054
        for errors, total in [(5, 100), (0, 50), (50, 50), (200, 3200)]:
            lo, hi = wilson_interval(errors, total)
            p_hat = errors / total
            roots = np.roots(
                [total + z**2, -(2 * total * p_hat + z**2), total * p_hat**2]
            )
            np.testing.assert_allclose(sorted([lo, hi]), np.sort(roots), atol=1e-12)

    def test_wilson_bounds(self):
        lo, hi = wilson_interval(0, 10)
        assert lo == 0.0 and 0.0 < hi < 1.0
        lo, hi = wilson_interval(10, 10)
        assert hi == pytest.approx(1.0) and 0.0 < lo < 1.0


class TestConfigFiles:
    def test_grid_parsing(self):
        assert parse_snr_grid("0:2:6") == (0.0, 2.0, 4.0, 6.0)
        assert parse_snr_grid("1,3,9") == (1.0, 3.0, 9.0)
        assert parse_snr_grid([0, 5]) == (0.0, 5.0)
        assert parse_snr_grid("inf") == (INF,)
        assert parse_snr_grid(7) == (7.0,)

    def test_grid_rejects_bad_spec(self):
        with pytest.raises(ValueError):
            parse_snr_grid("0:0:10")
        with pytest.raises(ValueError):
            parse_snr_grid("0:2")

    def test_unknown_keys_rejected(self):
        raw = {"nt": 2, "nr": 2, "l": 4, "j": 2, "snr_db": [0], "trials": 1,
               "turbo": True}
        with pytest.raises(ValueError, match="unknown config keys"):
            spec_from_dict(raw)

    def test_missing_keys_rejected(self):
        with pytest.raises(ValueError, match="missing config keys"):
            spec_from_dict({"nt": 2, "nr": 2})

    def test_load_roundtrip(self, tmp_path):
        raw = {
            "nt": 4, "nr": 4, "l": 8, "j": 2, "phi_seed": 880,
            "snr_db": "0:10:20", "trials": 7, "master_seed": 3,
            "solver": "ml", "baseline": "none", "early_stop_errors": 0,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(raw))
        spec = load_spec(path)
        assert spec.notation == "(4,4)-8"
        assert spec.snr_db == (0.0, 10.0, 20.0)
        assert spec.trials == 7
        assert spec.baseline is None

    def test_shipped_recipes_load(self):
        from conftest import recipe_path

        for name, notation in [
            ("mimo2x2_l4.json", "(2,2)-4"),
            ("mimo4x4_l8.json", "(4,4)-8"),
            ("mimo20x20_l40.json", "(20,20)-40"),
        ]:
            spec = load_spec(recipe_path(name))
            assert spec.notation == notation
