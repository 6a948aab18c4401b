import numpy as np
import pytest

from spde_damping.streams import gaussian_reference, gaussians, raw_words, stream_key


def test_gaussians_match_scalar_reference():
    g = gaussians(11, 3, 5, 0, 37)
    ref = [gaussian_reference(11, 3, 5, n) for n in range(37)]
    np.testing.assert_array_equal(g, ref)


def test_offset_windows_agree():
    full = gaussians(1, 0, 0, 0, 200)
    np.testing.assert_array_equal(gaussians(1, 0, 0, 64, 100), full[64:164])


def test_streams_differ_by_key_and_step():
    a = gaussians(1, 0, 0, 0, 16)
    assert not np.array_equal(a, gaussians(2, 0, 0, 0, 16))
    assert not np.array_equal(a, gaussians(1, 1, 0, 0, 16))
    assert not np.array_equal(a, gaussians(1, 0, 1, 0, 16))


def test_raw_words_require_block_alignment():
    with pytest.raises(ValueError):
        raw_words(stream_key(0, 0), 0, 2, 8)


def test_gaussian_moments():
    g = gaussians(2024, 0, 0, 0, 400_000)
    assert abs(g.mean()) < 5 * 1 / np.sqrt(g.size)
    assert abs(g.var() - 1) < 5 * np.sqrt(2 / g.size)
    assert abs(np.mean(g**4) - 3) < 0.05
