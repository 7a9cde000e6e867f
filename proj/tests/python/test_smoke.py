import json
import math
import os
import subprocess

import pytest

import shuntlab as sl


def beam():
    return sl.PiezoModel.from_frequencies_hz(31.08, 31.29, 245e-9)


def test_beam_tuning():
    m = beam()
    assert m.kc == pytest.approx(0.116, abs=1e-3)
    s = sl.tune_series_rl(m)
    assert s.inductance == pytest.approx(105.7, rel=5e-3)
    assert s.resistance == pytest.approx(2961.0, rel=1e-2)


def test_domain_errors_become_value_errors():
    with pytest.raises(ValueError):
        sl.eemcf(2.0, 1.0)
    with pytest.raises(ValueError):
        sl.tune_series_rl(sl.PiezoModel.normalized(1.2))


def test_numerical_error_is_exposed():
    m = sl.PiezoModel.normalized(0.1)
    h = sl.open_loop_tf(m, sl.tune_series_rl(m))
    opts = sl.MarginOptions()
    opts.band_low, opts.band_high = 10.0, 100.0
    with pytest.raises(sl.NumericalError):
        sl.stability_margins(h, 1.0, opts)


def test_critical_delay_methods_agree():
    m = beam()
    y = sl.shunt_admittance(sl.tune_series_rl(m))
    zoh = sl.critical_delay_numeric(m, y, sl.DelayModel.Kind.ZOH)
    pure = sl.critical_delay_numeric(m, y, sl.DelayModel.Kind.PURE_DELAY)
    series = sl.critical_delay_series(m.kc, m.omega_sc)
    for r in (zoh, pure, series):
        assert r.tau_c == pytest.approx(1.3e-3, rel=0.03)


def test_root_locus_crosses_at_the_critical_delay():
    m = sl.PiezoModel.normalized(0.1)
    y = sl.shunt_admittance(sl.tune_series_rl(m))
    locus = sl.root_locus(m, y, sl.DelayModel.Kind.ZOH, 0.4, 0.002)
    tau_c = sl.critical_delay_numeric(m, y, sl.DelayModel.Kind.ZOH).tau_c
    assert locus.crossing is not None
    assert locus.crossing.tau == pytest.approx(tau_c, rel=1e-3)
    assert len(locus.poles[0]) == 4


def test_equal_peaks():
    m = sl.PiezoModel.normalized(0.05)
    y = sl.shunt_admittance(sl.tune_series_rl(m))
    curve = sl.closed_loop_frf(m, y, sl.DelayModel.none(), sl.default_resonant_grid())
    peaks = sl.find_peaks(curve)
    assert len(peaks) == 2
    assert peaks[0].amplitude == pytest.approx(peaks[1].amplitude, rel=1e-2)


def test_stabilization_keeps_poles():
    m = sl.PiezoModel.normalized(0.1)
    y = sl.shunt_admittance(sl.tune_series_rl(m))
    st = sl.stabilize(m, y, 0.1)
    check = sl.verify_pole_placement(m, st.admittance, 0.1, st.target_poles)
    assert check.all_stable
    assert max(check.displacements) < 0.05
    assert st.factors.delta_b[0] == 0.0


def test_simulation_verdicts():
    m = sl.PiezoModel.normalized(0.1)
    y = sl.shunt_admittance(sl.tune_series_rl(m))
    tau_c = sl.critical_delay_numeric(m, y, sl.DelayModel.Kind.ZOH).tau_c
    sweep = sl.default_sweep(m)
    opts = sl.SimOptions()
    opts.substeps = 16
    low = sl.simulate_swept_sine(m, sl.tustin_discretize(y, 0.5 * tau_c), 0.5 * tau_c, sweep, opts)
    high = sl.simulate_swept_sine(m, sl.tustin_discretize(y, 1.1 * tau_c), 1.1 * tau_c, sweep, opts)
    assert low.stable and not high.stable
    assert len(low.envelope) > 3


def test_tustin_unity_gain():
    c = sl.tustin_discretize(sl.RationalTF([1.0], [1.0]), 0.1)
    assert [c.step(v) for v in (0.3, -1.0, 2.5)] == pytest.approx([0.3, -1.0, 2.5])
    assert abs(sl.zoh_response(0.2, 0.0) - 1.0) < 1e-15
    assert math.isclose(abs(sl.zoh_response(0.2, 1j * math.pi / 0.2)), 2 / math.pi, rel_tol=1e-12)


@pytest.mark.skipif("SHUNTLAB_EXE" not in os.environ, reason="command-line tool not built")
def test_cli_tune(tmp_path):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps({
        "schema_version": 1,
        "model": {"type": "frequencies_hz", "f_sc": 31.08, "f_oc": 31.29, "cp_eps": 245e-9},
    }))
    out = tmp_path / "out"
    r = subprocess.run([os.environ["SHUNTLAB_EXE"], "tune", "--config", str(cfg), "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "summary.json").read_text())
    assert summary["shunt"]["inductance"] == pytest.approx(sl.tune_series_rl(beam()).inductance, rel=1e-15)
