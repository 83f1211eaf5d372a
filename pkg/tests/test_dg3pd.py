import numpy as np
import pytest

from modules.data.params_data import Dg3pdParams
from modules.data.state_data import Dg3pdState
from modules.data.synthetic import generate
from modules.models.dg3pd import (
    Dg3pdModel,
    adaptive_shrink,
    cartoon_update,
    dg3pd_decompose,
    dg3pd_step,
    texture_field_update,
)
from modules.operators.lattice import Axis, CirculantDiff
from modules.utils import SolverError


def dense_directional(shape: tuple[int, int], index: int, n_dirs: int) -> np.ndarray:
    d1, d2 = shape
    rows = CirculantDiff(Axis.ROWS, d1).matrix()
    cols = CirculantDiff(Axis.COLS, d2).matrix()
    angle = np.pi * index / n_dirs
    return np.sin(angle) * np.kron(rows, np.eye(d2)) + np.cos(angle) * np.kron(np.eye(d1), cols)


def test_adaptive_shrink_threshold():
    t = np.array([-10.0, 0.2, 5.0])
    np.testing.assert_allclose(adaptive_shrink(t, 0.1), [-9.0, 0.0, 4.0])


def test_texture_field_update_matches_dense_solve(rng):
    shape, n_dirs = (4, 4), 3
    beta2, beta3 = 0.5, 2.0
    g = rng.standard_normal((n_dirs, *shape))
    w = rng.standard_normal((n_dirs, *shape))
    lambda2 = rng.standard_normal((n_dirs, *shape))
    v = rng.standard_normal(shape)
    lambda3 = rng.standard_normal(shape)

    mats = [dense_directional(shape, a, n_dirs) for a in range(n_dirs)]
    expected = g.reshape(n_dirs, -1).copy()
    eye = np.eye(v.size)
    for a in range(n_dirs):
        others = sum(mats[s] @ expected[s] for s in range(n_dirs) if s != a)
        target = v.ravel() - others + lambda3.ravel() / beta3
        lhs = beta2 * eye + beta3 * mats[a].T @ mats[a]
        rhs = beta2 * (w[a].ravel() + lambda2[a].ravel() / beta2) + beta3 * mats[a].T @ target
        expected[a] = np.linalg.solve(lhs, rhs)

    result = texture_field_update(g, w, lambda2, v, lambda3, beta2, beta3)
    np.testing.assert_allclose(result.reshape(n_dirs, -1), expected, atol=1e-8)


def test_cartoon_update_matches_dense_solve(rng):
    shape, n_dirs = (4, 4), 3
    beta1, beta4 = 0.7, 0.2
    data = rng.standard_normal(shape)
    r = rng.standard_normal((n_dirs, *shape))
    lambda1 = rng.standard_normal((n_dirs, *shape))

    mats = [dense_directional(shape, a, n_dirs) for a in range(n_dirs)]
    lhs = beta4 * np.eye(data.size) + beta1 * sum(m.T @ m for m in mats)
    rhs = beta4 * data.ravel() + beta1 * sum(
        m.T @ (r[a].ravel() + lambda1[a].ravel() / beta1) for a, m in enumerate(mats)
    )
    expected = np.linalg.solve(lhs, rhs)

    result = cartoon_update(data, r, lambda1, beta1, beta4)
    np.testing.assert_allclose(result.ravel(), expected, atol=1e-8)


def test_constant_image_is_fixed_point():
    f = np.full((8, 8), 100.0)
    params = Dg3pdParams(n_dirs_l=4, n_dirs_s=4)
    state = Dg3pdState.initial(f, params.n_dirs_l, params.n_dirs_s)
    for _ in range(20):
        state = dg3pd_step(state, f, params)
    np.testing.assert_allclose(state.u, f, atol=1e-6)
    np.testing.assert_allclose(state.v, 0.0, atol=1e-6)
    np.testing.assert_allclose(state.eps, 0.0, atol=1e-6)
    assert len(state.history) == 20


def test_large_noise_ball_absorbs_residual(rng):
    f = 255.0 * rng.random((8, 8))
    params = Dg3pdParams(n_dirs_l=3, n_dirs_s=3, nu=10.0 * float(np.linalg.norm(f)))
    state = dg3pd_step(Dg3pdState.zeros(f.shape, 3, 3), f, params)
    np.testing.assert_allclose(state.eps, f - state.u - state.v, atol=1e-9)
    np.testing.assert_allclose(state.lambda4, 0.0, atol=1e-9)
    assert state.history.residual[-1] == pytest.approx(0.0, abs=1e-12)


def test_state_shape_mismatch():
    with pytest.raises(SolverError):
        dg3pd_step(Dg3pdState.zeros((4, 4), 2, 2), np.zeros((5, 5)), Dg3pdParams(n_dirs_l=2, n_dirs_s=2))


def test_texture_off_keeps_v_zero(rng):
    f = 255.0 * rng.random((8, 8))
    params = Dg3pdParams(n_dirs_l=3, n_dirs_s=3, iters=10, texture=False)
    _, v, _, state = dg3pd_decompose(f, params)
    np.testing.assert_array_equal(v, 0.0)
    np.testing.assert_array_equal(state.g, 0.0)


def test_decompose_runs_budget_and_stops_early():
    f = np.full((8, 8), 50.0)
    params = Dg3pdParams(n_dirs_l=2, n_dirs_s=2, iters=15)
    assert len(dg3pd_decompose(f, params)[3].history) == 15
    params = Dg3pdParams(n_dirs_l=2, n_dirs_s=2, iters=15, tol=-1.0)
    assert len(dg3pd_decompose(f, params)[3].history) == 2


def test_model_result_on_unit_scale(rng):
    f = rng.random((16, 16))
    result = Dg3pdModel(Dg3pdParams(n_dirs_l=3, n_dirs_s=3, iters=30)).run(f)
    assert result.pipeline == "dg3pd-only"
    assert result.phases is None
    assert result.b is None
    assert result.f_seg is None
    assert np.max(np.abs(result.u)) < 2.0
    assert np.count_nonzero(result.v) < result.v.size


def stripe_band_energy(x: np.ndarray, column_freq: int) -> float:
    spectrum = np.abs(np.fft.fft2(x)) ** 2
    return float(spectrum[:, column_freq].sum() + spectrum[:, -column_freq].sum())


def test_texture_captures_stripe_band():
    clean, _ = generate("squares-stripes", 64, np.random.default_rng(0))
    f = 255.0 * clean
    _, v, _, _ = dg3pd_decompose(f, Dg3pdParams(nu=1.0, iters=300))
    assert stripe_band_energy(f, 16) > 0
    assert stripe_band_energy(v, 16) >= 0.8 * stripe_band_energy(f, 16)


def test_noise_ball_takes_pure_noise():
    f = 20.0 * np.random.default_rng(2).standard_normal((32, 32))
    _, _, eps, _ = dg3pd_decompose(f, Dg3pdParams(nu=60.0, iters=300))
    assert np.sum(eps**2) >= 0.9 * np.sum(f**2)
