"""Signal synthesis and projection tests.

Two oracles: sinc trains are re-evaluated term by term in 50-digit mpmath
arithmetic, and projections of span elements are recovered through numerical
inner products against the generator shifts (which is the defining property
of an orthogonal projection, independent of the sampling shortcut the
implementation uses).
"""

import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import simpson

import bandquant as bq


def _oracle_sinc_train(model, t):
    """Sum of coeff * sinc(t - k) in 50-digit arithmetic."""
    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for k, a in zip(model.ks, model.coeffs):
            total += mpmath.mpf(a) * mpmath.sincpi(mpmath.mpf(t) - int(k))
        return float(total)


def _oracle_projection_coeff(fv, j, gen):
    """<f, g(. - j/lam)> by quadrature; the honest projection coefficient."""
    lam = gen.lam
    lo = j / lam - gen.params.tail_cut
    hi = gen.params.tail_cut + abs(float(fv.context.index_set[-1])) / lam
    t = np.linspace(lo, hi, int((hi - lo) / 5e-3) + 1)
    return float(simpson(fv.eval(t) * gen.eval(t - j / lam), x=t))


# --- synthesis ---------------------------------------------------------------


def test_synth_deterministic():
    a = bq.synth_test_signal(7, 12, 0.9)
    b = bq.synth_test_signal(7, 12, 0.9)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    c = bq.synth_test_signal(8, 12, 0.9)
    assert not np.array_equal(a.coeffs, c.coeffs)
    assert a.seed == 7 and a.target_sup == 0.9
    assert a.ks[0] == -12 and a.ks[-1] == 12


def test_synth_sup_norm_below_target():
    model = bq.synth_test_signal(1, 12, 0.9)
    grid = np.linspace(-20.0, 20.0, 100001)
    sup = float(np.max(np.abs(model.eval(grid))))
    assert sup <= 0.9 + 1e-9
    assert sup >= 0.85  # scaled to sit just under the target, not far below


def test_synth_validation():
    with pytest.raises(ValueError):
        bq.synth_test_signal(1, 12, 0.0)
    with pytest.raises(ValueError):
        bq.synth_test_signal(1, 12, 1.5)
    with pytest.raises(ValueError):
        bq.synth_test_signal(1, -2, 0.9)


def test_eval_at_integer_nodes_recovers_coefficients():
    model = bq.synth_test_signal(3, 10, 0.9)
    np.testing.assert_allclose(
        model.eval(model.ks.astype(float)), model.coeffs, atol=1e-14
    )


def test_eval_matches_high_precision_oracle():
    model = bq.synth_test_signal(5, 12, 0.9)
    rng = np.random.default_rng(11)
    for t in rng.uniform(-15.0, 15.0, 20):
        assert model.eval(float(t)) == pytest.approx(
            _oracle_sinc_train(model, float(t)), abs=1e-12
        )


def test_single_sinc_model():
    model = bq.SignalModel(ks=np.array([4]), coeffs=np.array([0.5]))
    assert model.eval(4.0) == pytest.approx(0.5, abs=1e-15)
    assert model.eval(4.5) == pytest.approx(0.5 * math.sin(0.5 * math.pi) / (0.5 * math.pi))
    out = model.eval(np.array([3.0, 4.0, 5.0]))
    np.testing.assert_allclose(out, [0.0, 0.5, 0.0], atol=1e-15)


def test_signal_csv_roundtrip(tmp_path):
    model = bq.synth_test_signal(9, 8, 0.7)
    path = tmp_path / "signal.csv"
    model.to_csv(path)
    clone = bq.SignalModel.from_csv(path)
    np.testing.assert_array_equal(clone.ks, model.ks)
    np.testing.assert_array_equal(clone.coeffs, model.coeffs)
    assert clone.seed == 9 and clone.target_sup == 0.7
    bad = tmp_path / "bad.csv"
    bad.write_text("k,coefficient\n0,1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="not a signal"):
        bq.SignalModel.from_csv(bad)


def test_signal_model_validation():
    with pytest.raises(ValueError):
        bq.SignalModel(ks=np.array([1, 2]), coeffs=np.array([1.0]))


# --- projection --------------------------------------------------------------


def test_projection_values_are_scaled_lattice_samples(gen):
    model = bq.synth_test_signal(1, 12, 0.9)
    pf = bq.project(model, gen, 5.0, 0.5)
    assert pf.context.k_max == 22
    expected = model.eval(pf.context.shift_points) / math.sqrt(2.0)
    np.testing.assert_array_equal(pf.values, expected)


def test_projection_identity_on_span(gen, ctx):
    rng = np.random.default_rng(12)
    for _ in range(20):
        c = rng.normal(size=ctx.dimension)
        fv = bq.CoefficientVector(values=c, context=ctx)
        back = bq.project(fv, gen, 5.0, 0.5)
        np.testing.assert_array_equal(back.values, c)


def test_projection_matches_inner_product_oracle(gen, ctx):
    rng = np.random.default_rng(13)
    c = rng.normal(size=ctx.dimension)
    fv = bq.CoefficientVector(values=c, context=ctx)
    for j in (-22, -5, 0, 7, 22):
        coeff = _oracle_projection_coeff(fv, j, gen)
        assert coeff == pytest.approx(c[j + ctx.k_max], abs=2e-7), f"j={j}"


def test_projection_restricts_and_pads_between_windows(gen, ctx):
    rng = np.random.default_rng(14)
    big_ctx = bq.KernelContext.from_box(gen, 6.0, 0.5)
    c = rng.normal(size=big_ctx.dimension)
    fv = bq.CoefficientVector(values=c, context=big_ctx)
    down = bq.project(fv, gen, 5.0, 0.5)
    assert down.context.k_max == 22
    np.testing.assert_array_equal(
        down.values, c[big_ctx.k_max - 22 : big_ctx.k_max + 23]
    )
    small = bq.CoefficientVector(
        values=np.arange(ctx.dimension, dtype=float), context=ctx
    )
    up = bq.project(small, gen, 6.0, 0.5)
    assert up.context.k_max == big_ctx.k_max
    pad = big_ctx.k_max - 22
    assert np.all(up.values[:pad] == 0.0) and np.all(up.values[-pad:] == 0.0)
    np.testing.assert_array_equal(up.values[pad:-pad], small.values)


def test_project_rejects_narrow_shell(gen):
    model = bq.synth_test_signal(1, 12, 0.9)
    with pytest.raises(ValueError, match="eps"):
        bq.project(model, gen, 5.0, 0.1)


def test_projection_error_report_bandlimited(gen):
    model = bq.synth_test_signal(1, 12, 0.9)
    pf = bq.project(model, gen, 5.0, 0.5)
    report = bq.projection_error_report(model, pf, 5.0, r=11)
    assert report.passed
    assert not report.vacuous
    assert report.measured < 1e-2
    assert report.bound < 1.0


def test_projection_error_report_span_element(gen, ctx):
    rng = np.random.default_rng(15)
    fv = bq.CoefficientVector(values=rng.normal(size=ctx.dimension), context=ctx)
    pf = bq.project(fv, gen, 5.0, 0.5)
    report = bq.projection_error_report(fv, pf, 5.0, r=11)
    assert report.measured < 1e-8


def test_projection_error_report_validation(gen):
    model = bq.synth_test_signal(1, 12, 0.9)
    pf = bq.project(model, gen, 5.0, 0.5)
    with pytest.raises(ValueError, match="half-width"):
        bq.projection_error_report(model, pf, 11.25, r=11)
    with pytest.raises(ValueError):
        bq.projection_error_report(model, pf, -1.0, r=11)
