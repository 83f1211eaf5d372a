import numpy as np
import pytest

from modules.data.params_data import BilevelParams, Dg3pdParams, ShtmsParams
from modules.data.synthetic import add_gaussian_noise, generate
from modules.models.bilevel import (
    BilevelModel,
    bilevel_binarize,
    bilevel_initial_state,
    bilevel_segment,
    shtms_step,
)
from modules.models.dg3pd import Dg3pdModel
from modules.operators.dualsolvers import DualState
from modules.utils import SolverError


def small_params(**overrides) -> BilevelParams:
    values = {
        "iters": 2,
        "inner_iters": 5,
        "decomposition": Dg3pdParams(n_dirs_l=3, n_dirs_s=3, iters=10),
        "segmentation": ShtmsParams(n_phases=2),
    }
    values.update(overrides)
    return BilevelParams(**values)


def test_binarize_is_hard_partition(rng):
    u = 255.0 * rng.random((8, 8))
    means = np.array([40.0, 128.0, 220.0])
    q = [DualState.zeros(2, u.shape) for _ in means]
    labels = bilevel_binarize(u, means, q, 100.0)
    assert set(np.unique(labels)) <= {0.0, 1.0}
    np.testing.assert_array_equal(labels.sum(axis=0), 1.0)
    nearest = np.argmin(np.abs(u[None] - means[:, None, None]), axis=0)
    np.testing.assert_array_equal(np.argmax(labels, axis=0), nearest)


def test_binarize_ties_go_to_lowest_index():
    u = np.full((2, 2), 5.0)
    q = [DualState.zeros(2, u.shape) for _ in range(2)]
    labels = bilevel_binarize(u, np.array([4.0, 6.0]), q, 1.0)
    np.testing.assert_array_equal(labels[0], 1.0)


def test_shtms_step_partition_of_unity(two_level_image):
    u = 255.0 * two_level_image
    phases = np.zeros((2, *u.shape))
    q = [DualState.zeros(2, u.shape) for _ in range(2)]
    phases, new_q, means = shtms_step(phases, q, np.array([0.0, 127.0]), u, ShtmsParams(n_phases=2))
    np.testing.assert_allclose(phases.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_array_equal(means, [0.0, 127.0])
    assert new_q[0].iteration == 1
    assert q[0].iteration == 0


def test_shtms_step_needs_two_phases(two_level_image):
    with pytest.raises(SolverError):
        shtms_step(
            np.zeros((1, 16, 16)),
            [DualState.zeros(2, (16, 16))],
            np.array([0.0]),
            two_level_image,
            ShtmsParams(),
        )


def test_initial_state():
    params = small_params()
    state = bilevel_initial_state(np.ones((4, 4)), params)
    np.testing.assert_array_equal(state.u, 1.0)
    assert state.phases.shape == (2, 4, 4)
    np.testing.assert_array_equal(state.means, [0.0, 127.0])


def test_segment_runs_inner_and_outer_loops(two_level_image):
    state = bilevel_segment(255.0 * two_level_image, small_params())
    assert len(state.history) == 10
    assert state.q[0].iteration == 2
    np.testing.assert_allclose(state.phases.sum(axis=0), 1.0, atol=1e-12)


def test_disabled_segmentation_matches_decomposition(rng):
    f = rng.random((16, 16))
    params = small_params(segment=False)
    bilevel = BilevelModel(params).run(f)
    dg3pd = Dg3pdModel(params.decomposition).run(f)
    np.testing.assert_array_equal(bilevel.u, dg3pd.u)
    np.testing.assert_array_equal(bilevel.v, dg3pd.v)
    np.testing.assert_array_equal(bilevel.eps, dg3pd.eps)
    assert bilevel.phases is None


def test_model_on_squares_stripes():
    rng = np.random.default_rng(7)
    f, _ = generate("squares-stripes", 32, rng)
    result = BilevelModel(small_params(segmentation=ShtmsParams(n_phases=3))).run(f)
    assert result.pipeline == "bilevel"
    assert result.labels.shape == (3, 32, 32)
    np.testing.assert_array_equal(result.labels.sum(axis=0), 1.0)
    assert set(np.unique(result.labels)) <= {0.0, 1.0}


def test_texture_mask_finds_stripes():
    rng = np.random.default_rng(7)
    clean, truth = generate("squares-stripes", 64, rng)
    f = add_gaussian_noise(clean, 0.02, rng)
    result = BilevelModel(BilevelParams(iters=20)).run(f)
    cartoon = np.where(truth.labels == 1, 0.8, 0.3)
    stripes = truth.texture_mask & (np.abs(clean - cartoon) > 1e-6)
    assert stripes.sum() > 0
    recall = result.v_bin[stripes].mean()
    assert recall >= 0.9
