import numpy as np
import pytest

from modules.operators.diffops import (
    adjoint_residual,
    dir_bwd_diff,
    dir_div,
    dir_div_fwd,
    dir_fwd_diff,
    dir_grad,
    dir_grad_bwd,
    dir_symbols,
    direction_weights,
    dtv_norm,
    magnitude,
)
from modules.operators.lattice import Axis, CirculantDiff, dft_forward
from modules.utils import OperatorError


def dense_directional(shape: tuple[int, int], index: int, n_dirs: int) -> np.ndarray:
    """Dense matrix of the forward difference acting on row-major vectors."""
    d1, d2 = shape
    rows = CirculantDiff(Axis.ROWS, d1).matrix()
    cols = CirculantDiff(Axis.COLS, d2).matrix()
    angle = np.pi * index / n_dirs
    return np.sin(angle) * np.kron(rows, np.eye(d2)) + np.cos(angle) * np.kron(np.eye(d1), cols)


def test_direction_weights():
    sin, cos = direction_weights(2)
    np.testing.assert_allclose(sin, [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(cos, [1.0, 0.0], atol=1e-15)
    with pytest.raises(OperatorError):
        direction_weights(0)


def test_direction_index_checked():
    with pytest.raises(OperatorError):
        dir_fwd_diff(np.zeros((3, 3)), 3, 3)
    with pytest.raises(OperatorError):
        dir_bwd_diff(np.zeros((3, 3)), -1, 3)


def test_field_layers_checked():
    with pytest.raises(OperatorError):
        dir_div(np.zeros((2, 3, 3)), 3)


def test_adjointness_random_cases(rng):
    for _ in range(200):
        shape = tuple(int(d) for d in rng.integers(1, 9, size=2))
        n_dirs = int(rng.integers(1, 10))
        f = rng.standard_normal(shape)
        g = rng.standard_normal((n_dirs, *shape))
        assert abs(adjoint_residual(f, g, n_dirs)) < 1e-10


def test_forward_sum_adjoint(rng):
    f = rng.standard_normal((5, 7))
    g = rng.standard_normal((4, 5, 7))
    lhs = np.vdot(dir_div_fwd(g, 4), f)
    rhs = -np.vdot(g, dir_grad_bwd(f, 4))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@pytest.mark.parametrize("shape", [(2, 3), (4, 4), (5, 8), (8, 8)])
@pytest.mark.parametrize("n_dirs", [1, 3, 9])
def test_dense_circulant_oracle(rng, shape, n_dirs):
    f = rng.standard_normal(shape)
    g = rng.standard_normal((n_dirs, *shape))
    grad = dir_grad(f, n_dirs)
    div = np.zeros(f.size)
    for index in range(n_dirs):
        mat = dense_directional(shape, index, n_dirs)
        np.testing.assert_allclose(grad[index].ravel(), mat @ f.ravel(), atol=1e-10)
        np.testing.assert_allclose(
            dir_fwd_diff(f, index, n_dirs).ravel(), mat @ f.ravel(), atol=1e-10
        )
        np.testing.assert_allclose(
            dir_bwd_diff(g[index], index, n_dirs).ravel(), -mat.T @ g[index].ravel(), atol=1e-10
        )
        div -= mat.T @ g[index].ravel()
    np.testing.assert_allclose(dir_div(g, n_dirs).ravel(), div, atol=1e-10)


def test_frequency_symbols(rng):
    f = rng.standard_normal((6, 10))
    symbols = dir_symbols(5, f.shape)
    spectrum = dft_forward(f)
    for index in range(5):
        np.testing.assert_allclose(
            dft_forward(dir_fwd_diff(f, index, 5)), symbols[index] * spectrum, atol=1e-10
        )
        np.testing.assert_allclose(
            dft_forward(-dir_bwd_diff(f, index, 5)), np.conj(symbols[index]) * spectrum, atol=1e-10
        )


def test_constant_image_has_zero_variation():
    f = np.full((6, 6), 3.0)
    np.testing.assert_array_equal(dir_grad(f, 4), 0.0)
    assert dtv_norm(f, 4) == 0.0


def test_vertical_edge_variation():
    f = np.zeros((6, 8))
    f[:, :4] = 1.0
    # one horizontal direction: two jumps per row, the second across the wrap
    assert dtv_norm(f, 1) == pytest.approx(12.0)


def test_magnitude():
    g = np.stack([np.full((2, 2), 3.0), np.full((2, 2), 4.0)])
    np.testing.assert_allclose(magnitude(g), 5.0)
