import math

import numpy as np
import pytest

from hermite_qi import harness as hs

rng = np.random.default_rng(20)


def test_test_function_values():
    assert hs.nielson_value(0.0, 1.0) == 0.5
    assert hs.franke_value(0.0, 0.0) == pytest.approx(0.6652, abs=5e-5)


@pytest.mark.parametrize("tf", [hs.FRANKE, hs.NIELSON], ids=lambda t: t.name)
def test_gradients_match_finite_differences(tf):
    x, y = rng.random(100), rng.random(100)
    step = 1e-6
    gx, gy = tf.gradient(x, y)
    fdx = (tf.value(x + step, y) - tf.value(x - step, y)) / (2 * step)
    fdy = (tf.value(x, y + step) - tf.value(x, y - step)) / (2 * step)
    scale = np.maximum(1.0, np.abs(np.concatenate([gx, gy])).max())
    assert np.allclose(fdx, gx, rtol=1e-6, atol=1e-6 * scale)
    assert np.allclose(fdy, gy, rtol=1e-6, atol=1e-6 * scale)


def test_sample_lattice_has_28_points():
    taus = hs.sample_barycentrics()
    assert taus.shape == (28, 3)
    assert np.allclose(taus.sum(axis=1), 1)


def test_quadratic_error_at_rounding_level():
    tf = hs.polynomial_function((0.5, -1, 2, 3, -0.5, 1.5))
    assert hs.error_scan(tf, 8) <= 1e-10
    rows = hs.convergence_table(tf, [4, 8])
    assert all(r.error <= 1e-10 for r in rows)


def test_error_scan_examples():
    assert hs.error_scan(hs.FRANKE, 128) == pytest.approx(7.550e-5, rel=0.15)
    assert hs.error_scan(hs.NIELSON, 8) == pytest.approx(5.258e-1, rel=0.15)


def test_sampling_density_robustness():
    for tf in (hs.FRANKE, hs.NIELSON):
        base = hs.error_scan(tf, 32)
        dense = hs.error_scan(tf, 32, sample_degree=9)  # 55 points, about twice as many
        assert abs(dense - base) < 0.05 * base


def test_gradient_error_is_one_order_lower():
    _, g16 = hs.error_scan(hs.FRANKE, 16, gradient=True)
    _, g64 = hs.error_scan(hs.FRANKE, 64, gradient=True)
    assert 1.7 < math.log(g16 / g64, 4) < 3.5


def test_nco_examples():
    assert hs.nco(1.0, 0.5, 1.0, 0.5) == pytest.approx(1.0)
    assert round(hs.nco(3.624e-1, 8.836e-2, 1 / 8, 1 / 16), 3) == 2.036
    assert round(hs.nco(8.836e-2, 8.742e-3, 1 / 16, 1 / 32), 3) == 3.337
    for bad in ((0, 1, 1, 0.5), (1, -1, 1, 0.5), (1, 1, 0, 0.5)):
        with pytest.raises(ValueError):
            hs.nco(*bad)


def test_convergence_orders_are_in_range():
    for tf in (hs.FRANKE, hs.NIELSON):
        rows = hs.convergence_table(tf, [16, 32, 64, 128])
        assert all(3.0 <= r.nco <= 3.9 for r in rows[1:])


def test_convergence_table_rejects_unsorted_input():
    with pytest.raises(ValueError):
        hs.convergence_table(hs.FRANKE, [16, 8])
    with pytest.raises(ValueError):
        hs.error_scan(hs.FRANKE, 0)


def test_table_csv(tmp_path):
    rows = [hs.ConvergenceRow(8, 0.125, 0.36241, None), hs.ConvergenceRow(16, 0.0625, 0.088357, 2.0359)]
    hs.write_table_csv(tmp_path / "t.csv", rows)
    assert (tmp_path / "t.csv").read_text().splitlines() == ["n,error,nco", "8,3.624e-01,", "16,8.836e-02,2.036"]
