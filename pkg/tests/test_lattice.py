import numpy as np
import pytest

from modules.operators.lattice import (
    Axis,
    CirculantDiff,
    Side,
    apply_circulant,
    as_image,
    backward_difference,
    dft_forward,
    dft_inverse,
    forward_difference,
    frequency_grid,
)
from modules.utils import OperatorError


def test_as_image_returns_float_copy():
    x = np.arange(6, dtype=np.int64).reshape(2, 3)
    image = as_image(x)
    assert image.dtype == np.float64
    image[0, 0] = 10
    assert x[0, 0] == 0


@pytest.mark.parametrize(
    "bad", [np.zeros(4), np.zeros((2, 2, 2)), np.zeros((0, 3)), np.array([[1.0, np.nan]])]
)
def test_as_image_rejects_invalid(bad):
    with pytest.raises(OperatorError):
        as_image(bad)


def test_periodic_differences():
    x = np.array([[1.0, 2.0, 4.0]])
    np.testing.assert_array_equal(forward_difference(x, -1), [[1.0, 2.0, -3.0]])
    np.testing.assert_array_equal(backward_difference(x, -1), [[-3.0, 1.0, 2.0]])


def test_circulant_matrix_layout():
    mat = CirculantDiff(Axis.ROWS, 3).matrix()
    np.testing.assert_array_equal(mat, [[-1, 1, 0], [0, -1, 1], [1, 0, -1]])


@pytest.mark.parametrize("shape", [(5, 6), (1, 4), (3, 1), (8, 8)])
def test_circulant_apply_matches_dense_product(rng, shape):
    x = rng.standard_normal(shape)
    rows = CirculantDiff.for_image(x, Axis.ROWS)
    cols = CirculantDiff.for_image(x, Axis.COLS)
    d1, d2 = rows.matrix(), cols.matrix()
    np.testing.assert_allclose(apply_circulant(rows, x, Side.LEFT), d1 @ x, atol=1e-12)
    np.testing.assert_allclose(apply_circulant(rows, x, Side.LEFT_TRANSPOSE), d1.T @ x, atol=1e-12)
    np.testing.assert_allclose(apply_circulant(cols, x, Side.RIGHT), x @ d2, atol=1e-12)
    np.testing.assert_allclose(apply_circulant(cols, x, Side.RIGHT_TRANSPOSE), x @ d2.T, atol=1e-12)


def test_circulant_rejects_wrong_side_and_size():
    rows = CirculantDiff(Axis.ROWS, 4)
    with pytest.raises(OperatorError):
        rows.apply(np.zeros((4, 4)), Side.RIGHT)
    with pytest.raises(OperatorError):
        rows.apply(np.zeros((3, 4)), Side.LEFT)


def test_dft_round_trip(rng):
    x = rng.standard_normal((6, 10))
    np.testing.assert_allclose(dft_inverse(dft_forward(x)), x, atol=1e-12)


def test_dft_of_constant_is_dc_only():
    spectrum = dft_forward(np.full((4, 4), 2.0))
    assert spectrum[0, 0] == pytest.approx(32.0)
    spectrum[0, 0] = 0
    np.testing.assert_allclose(np.abs(spectrum), 0.0, atol=1e-12)


def test_dft_rejects_bad_input():
    with pytest.raises(OperatorError):
        dft_forward(np.zeros(4))
    with pytest.raises(OperatorError):
        dft_inverse(np.array([[np.inf + 0j]]))


def test_frequency_grid_roots_of_unity():
    z1, z2 = frequency_grid((4, 6))
    assert z1.shape == (4, 1)
    assert z2.shape == (1, 6)
    np.testing.assert_allclose(z1**4, 1.0, atol=1e-12)
    np.testing.assert_allclose(z2**6, 1.0, atol=1e-12)
    assert z1[1, 0] == pytest.approx(1j)
