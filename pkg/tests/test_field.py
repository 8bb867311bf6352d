import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_centered_dft2
from windowqpi.field import (
    ComplexField,
    Domain,
    WindowSpec,
    crop_center,
    dft2_centered,
    from_amp_phase,
    idft2_centered,
    pad_center,
    window_mask,
)


def random_field(rng, h, w=None):
    w = h if w is None else w
    return ComplexField(rng.standard_normal((h, w)) + 1j * rng.standard_normal((h, w)))


class TestFromAmpPhase:
    def test_identity(self):
        f = from_amp_phase(np.ones((3, 4)), np.zeros((3, 4)))
        assert f.domain is Domain.SPATIAL
        np.testing.assert_array_equal(f.values, np.ones((3, 4), dtype=complex))

    def test_unit_rotation(self):
        f = from_amp_phase(np.ones((2, 2)), np.full((2, 2), np.pi / 2))
        np.testing.assert_allclose(f.values, 1j, atol=1e-15)

    def test_euler(self):
        f = from_amp_phase([[2.0]], [[np.pi]])
        assert f.values[0, 0] == pytest.approx(-2 + 0j, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            from_amp_phase(np.ones((2, 2)), np.ones((2, 3)))

    def test_negative_amplitude(self):
        with pytest.raises(ValueError):
            from_amp_phase(-np.ones((2, 2)), np.zeros((2, 2)))


def test_field_is_immutable():
    f = ComplexField(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1
    assert f.width == 2 and f.height == 2 and f.energy() == 0


@pytest.mark.parametrize("n", [4, 5, 8])
def test_impulse_to_constant(n):
    x = np.zeros((n, n), dtype=complex)
    x[n // 2, n // 2] = 1
    out = dft2_centered(ComplexField(x))
    assert out.domain is Domain.FREQUENCY
    np.testing.assert_allclose(out.values, 1 / n, atol=1e-15)


def test_constant_to_impulse():
    n, c = 8, 0.7 - 0.2j
    out = dft2_centered(ComplexField(np.full((n, n), c))).values
    expected = np.zeros((n, n), dtype=complex)
    expected[n // 2, n // 2] = c * n
    np.testing.assert_allclose(out, expected, atol=1e-14)


def test_idft_of_centered_impulse():
    n, c = 6, 1.5
    x = np.zeros((n, n), dtype=complex)
    x[n // 2, n // 2] = c * n
    out = idft2_centered(ComplexField(x, Domain.FREQUENCY))
    assert out.domain is Domain.SPATIAL
    np.testing.assert_allclose(out.values, c, atol=1e-14)


@pytest.mark.parametrize("shape", [(4, 4), (8, 8), (5, 7), (16, 16), (3, 8)])
def test_dft_matches_direct_summation(shape):
    rng = np.random.default_rng(11)
    f = random_field(rng, *shape)
    np.testing.assert_allclose(dft2_centered(f).values, brute_centered_dft2(f.values), rtol=0, atol=1e-12)


def test_idft_conjugation_identity():
    f = random_field(np.random.default_rng(3), 8)
    lhs = idft2_centered(f).values
    rhs = np.conj(dft2_centered(ComplexField(np.conj(f.values))).values)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_round_trip_16():
    f = random_field(np.random.default_rng(5), 16)
    back = idft2_centered(dft2_centered(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12


@pytest.mark.parametrize("n", [4, 8, 16, 64])
def test_parseval(n):
    f = random_field(np.random.default_rng(n), n)
    e0, e1 = f.energy(), dft2_centered(f).energy()
    assert abs(e1 - e0) <= 1e-12 * e0


@settings(max_examples=30, deadline=None)
@given(h=st.integers(1, 12), w=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval_property(h, w, seed):
    f = random_field(np.random.default_rng(seed), h, w)
    F = dft2_centered(f)
    assert abs(F.energy() - f.energy()) <= 1e-12 * max(f.energy(), 1e-300)
    np.testing.assert_allclose(idft2_centered(F).values, f.values, atol=1e-12)


class TestPadCrop:
    def test_pad_256_to_1536(self):
        f = random_field(np.random.default_rng(0), 256)
        p = pad_center(f, 1536, 1536)
        assert p.shape == (1536, 1536)
        np.testing.assert_array_equal(p.values[640:896, 640:896], f.values)
        assert p.energy() == pytest.approx(f.energy(), rel=1e-15)
        assert np.count_nonzero(p.values) == np.count_nonzero(f.values)

    def test_pad_same_size(self):
        f = random_field(np.random.default_rng(1), 5, 6)
        np.testing.assert_array_equal(pad_center(f, 6, 5).values, f.values)

    def test_pad_single(self):
        out = pad_center(ComplexField([[5.0]]), 3, 3).values
        expected = np.zeros((3, 3))
        expected[1, 1] = 5
        np.testing.assert_array_equal(out, expected)

    def test_pad_rejects_smaller(self):
        with pytest.raises(ValueError):
            pad_center(ComplexField(np.ones((4, 4))), 3, 4)

    def test_crop_inverts_pad(self):
        f = random_field(np.random.default_rng(2), 6, 4)
        np.testing.assert_array_equal(crop_center(pad_center(f, 19, 12), 4, 6).values, f.values)

    def test_crop_same_size(self):
        f = random_field(np.random.default_rng(3), 4)
        np.testing.assert_array_equal(crop_center(f, 4, 4).values, f.values)

    def test_crop_center_value(self):
        x = np.zeros((3, 3))
        x[1, 1] = 7
        assert crop_center(ComplexField(x), 1, 1).values[0, 0] == 7

    def test_crop_rejects_larger(self):
        with pytest.raises(ValueError):
            crop_center(ComplexField(np.ones((4, 4))), 5, 4)

    @settings(max_examples=40, deadline=None)
    @given(h=st.integers(1, 9), w=st.integers(1, 9), ph=st.integers(0, 7), pw=st.integers(0, 7))
    def test_pad_crop_property(self, h, w, ph, pw):
        f = random_field(np.random.default_rng(h * 100 + w), h, w)
        back = crop_center(pad_center(f, w + pw, h + ph), w, h)
        np.testing.assert_array_equal(back.values, f.values)


class TestWindowMask:
    def test_seven_by_seven_on_1536(self):
        m = window_mask(WindowSpec.square(7), 1536, 1536)
        assert m.sum() == 49
        np.testing.assert_array_equal(m[765:772, 765:772], 1)

    def test_single_pixel(self):
        m = window_mask(WindowSpec.square(1), 8, 8)
        assert m.sum() == 1 and m[4, 4] == 1

    def test_full_grid(self):
        np.testing.assert_array_equal(window_mask(WindowSpec(9, 5), 9, 5), 1)

    def test_offset(self):
        m = window_mask(WindowSpec(3, 1, (2, -1)), 10, 10)
        assert m.sum() == 3
        np.testing.assert_array_equal(np.argwhere(m), [[4, 6], [4, 7], [4, 8]])

    def test_out_of_bounds(self):
        with pytest.raises(ValueError, match="does not fit"):
            window_mask(WindowSpec(3, 3, (4, 0)), 10, 10)

    @pytest.mark.parametrize("bad", [0, 2, -3, 4.5])
    def test_even_or_nonpositive_width(self, bad):
        with pytest.raises(ValueError):
            WindowSpec(bad, 3)

    @settings(max_examples=50, deadline=None)
    @given(
        hw=st.integers(0, 5), hh=st.integers(0, 5),
        gw=st.integers(18, 30), gh=st.integers(18, 30),
        dx=st.integers(-3, 3), dy=st.integers(-3, 3),
    )
    def test_mask_sum_property(self, hw, hh, gw, gh, dx, dy):
        spec = WindowSpec(2 * hw + 1, 2 * hh + 1, (dx, dy))
        m = window_mask(spec, gw, gh)
        assert set(np.unique(m)) <= {0.0, 1.0}
        assert m.sum() == spec.width_px * spec.height_px
