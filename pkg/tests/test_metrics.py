import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bilateral_denoise.fixtures import checkerboard
from bilateral_denoise.image import ImageError
from bilateral_denoise.metrics import NoiseSpec, add_gaussian_noise, evaluate, mse, psnr, ssim, ssim_window

import oracles

pixels = st.floats(0, 255, allow_nan=False)
pairs = st.integers(11, 16).flatmap(
    lambda n: st.tuples(arrays(np.float64, (n, n), elements=pixels), arrays(np.float64, (n, n), elements=pixels))
)


def test_zero_sigma_is_exact_copy():
    img = np.arange(20.0).reshape(4, 5)
    out = add_gaussian_noise(img, NoiseSpec(0.0, 1))
    np.testing.assert_array_equal(out, img)
    assert out is not img


def test_noise_is_reproducible_and_seed_dependent():
    img = np.zeros((16, 16))
    a = add_gaussian_noise(img, NoiseSpec(20, 5))
    np.testing.assert_array_equal(a, add_gaussian_noise(img, NoiseSpec(20, 5)))
    assert not np.array_equal(a, add_gaussian_noise(img, NoiseSpec(20, 6)))


def test_noise_is_not_clamped():
    out = add_gaussian_noise(np.zeros((64, 64)), NoiseSpec(20, 1))
    assert out.min() < 0


def test_noise_mean_and_level():
    clean = np.full((256, 256), 128.0)
    diff = add_gaussian_noise(clean, NoiseSpec(20, 11)) - clean
    assert abs(diff.mean()) <= 3 * 20 / 256
    assert abs(psnr(clean + diff, clean) - 10 * math.log10(255**2 / 400)) < 0.15


def test_noise_uses_one_row_major_draw():
    # the realisation is sigma times one standard-normal draw of the image shape
    n = np.random.default_rng(3).standard_normal((5, 7))
    np.testing.assert_array_equal(add_gaussian_noise(np.zeros((5, 7)), NoiseSpec(2.0, 3)), 2.0 * n)


@pytest.mark.parametrize("sigma, seed", [(-1, 0), (1, -1), (1, 2**64)])
def test_noise_spec_validation(sigma, seed):
    with pytest.raises(ValueError):
        NoiseSpec(sigma, seed)


def test_mse_examples():
    assert mse(np.zeros((2, 2)), np.zeros((2, 2))) == 0
    assert mse(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == 12.5


def test_mse_matches_double_loop(rng):
    a, b = rng.uniform(0, 255, (2, 23, 17))
    assert mse(a, b) == pytest.approx(oracles.mse(a, b), rel=1e-14)


def test_psnr_examples():
    a = np.zeros((4, 4))
    assert psnr(a, a) == math.inf
    assert psnr(a, a + 255) == pytest.approx(0.0, abs=1e-12)
    assert psnr(a, a + 1) == pytest.approx(48.13, abs=0.01)


def test_dimension_mismatch():
    for fn in (mse, psnr, ssim):
        with pytest.raises(ImageError):
            fn(np.zeros((12, 12)), np.zeros((12, 13)))


@given(pairs, st.floats(-50, 50))
def test_psnr_symmetric_and_offset_invariant(ab, c):
    a, b = ab
    assert psnr(a, b) == psnr(b, a)
    if np.array_equal(a, b):
        return
    assert psnr(a + c, b + c) == pytest.approx(psnr(a, b), abs=1e-9)


def test_psnr_definition(rng):
    a, b = rng.uniform(0, 255, (2, 8, 8))
    assert psnr(a, b) == pytest.approx(10 * math.log10(255**2 / oracles.mse(a, b)), rel=1e-12)


def test_ssim_window_is_normalised_gaussian():
    w = ssim_window()
    assert w.shape == (11,) and w.sum() == pytest.approx(1.0)
    assert w[5] / w[4] == pytest.approx(math.exp(1 / (2 * 1.5**2)))


def test_ssim_identity_and_inversion():
    x = checkerboard(32, 4, 10, 240) + np.arange(32)
    assert ssim(x, x) == pytest.approx(1.0, abs=1e-12)
    assert ssim(x, 255 - x) < 1


def test_ssim_matches_brute_force(rng):
    a = rng.uniform(0, 255, (64, 64))
    b = np.clip(a + rng.normal(0, 30, a.shape), 0, 255)
    assert ssim(a, b) == pytest.approx(oracles.ssim(a, b), abs=1e-9)


def test_ssim_rectangular_against_brute_force(rng):
    a = rng.uniform(0, 255, (13, 20))
    b = rng.uniform(0, 255, (13, 20))
    assert ssim(a, b) == pytest.approx(oracles.ssim(a, b), abs=1e-9)


@given(pairs)
def test_ssim_symmetric_and_bounded(ab):
    a, b = ab
    s = ssim(a, b)
    assert s == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1 - 1e-9 <= s <= 1 + 1e-9
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)


def test_ssim_needs_room_for_one_window():
    with pytest.raises(ImageError):
        ssim(np.zeros((10, 40)), np.zeros((10, 40)))


def test_evaluate_bundles_the_three_numbers(rng):
    a, b = rng.uniform(0, 255, (2, 16, 16))
    r = evaluate(a, b)
    assert (r.mse, r.psnr_db, r.ssim) == (mse(a, b), psnr(a, b), ssim(a, b))
