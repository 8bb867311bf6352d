import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import wrapped_loop_winding
from windowqpi.objects import ObjectKind, ObjectRecipe, generate, winding_number


def test_flat_pure_phase():
    obj = generate(ObjectRecipe(ObjectKind.PURE_PHASE, size=32, phase_range=0.0))
    np.testing.assert_array_equal(obj.amplitude, 1)
    np.testing.assert_array_equal(obj.phase, 0)


@pytest.mark.parametrize("m", [1, 4, 16])
def test_vortex_winding(m):
    obj = generate(ObjectRecipe(ObjectKind.VORTEX, size=128, topological_number=m))
    np.testing.assert_array_equal(obj.amplitude, 1)
    assert winding_number(obj.phase, 40) == pytest.approx(m, abs=1e-9)
    assert wrapped_loop_winding(obj.phase, 40) == pytest.approx(m, abs=1e-9)


def test_vortex_loop_sum_is_32pi():
    obj = generate(ObjectRecipe(ObjectKind.VORTEX, size=256, topological_number=16))
    assert 2 * np.pi * winding_number(obj.phase, 60) == pytest.approx(32 * np.pi, abs=1e-8)
    assert obj.phase.min() >= 0 and obj.phase.max() < 2 * np.pi


def test_vortex_plate_on_flat_surround():
    obj = generate(ObjectRecipe(ObjectKind.VORTEX, size=64, topological_number=4, vortex_radius=20.0))
    assert winding_number(obj.phase, 12) == pytest.approx(4, abs=1e-9)
    assert winding_number(obj.phase, 28) == pytest.approx(0, abs=1e-12)
    assert obj.phase[0, 0] == 0


def test_structured_object_is_deterministic():
    r = ObjectRecipe(ObjectKind.COMPLEX_STRUCTURED, size=64, seed=5)
    a, b = generate(r), generate(r)
    assert a.amplitude.tobytes() == b.amplitude.tobytes()
    assert a.phase.tobytes() == b.phase.tobytes()
    c = generate(ObjectRecipe(ObjectKind.COMPLEX_STRUCTURED, size=64, seed=6))
    assert not np.array_equal(a.phase, c.phase)


def test_pure_phase_shares_structured_phase():
    a = generate(ObjectRecipe(ObjectKind.COMPLEX_STRUCTURED, size=32, seed=1))
    b = generate(ObjectRecipe(ObjectKind.PURE_PHASE, size=32, seed=1))
    np.testing.assert_array_equal(a.phase, b.phase)


def test_tilt_ramp():
    obj = generate(ObjectRecipe(ObjectKind.TILT_BACKGROUND, size=16, phase_range=0.5))
    assert obj.phase[0, 0] == 0 and obj.phase[-1, -1] == pytest.approx(0.5)
    np.testing.assert_allclose(np.diff(obj.phase, axis=1), 0.5 / 30)


def test_pad_factor_passed_through():
    assert generate(ObjectRecipe(size=8), pad_factor=3).padded_shape == (24, 24)


@settings(max_examples=20, deadline=None)
@given(
    kind=st.sampled_from([ObjectKind.COMPLEX_STRUCTURED, ObjectKind.PURE_PHASE, ObjectKind.BLOBS]),
    size=st.sampled_from([16, 32, 48]),
    phase_range=st.floats(0.1, 6.0),
    amp_min=st.floats(1e-3, 1.0),
    contrast=st.floats(1.0, 200.0),
    seed=st.integers(0, 1000),
)
def test_bounds_respected_exactly(kind, size, phase_range, amp_min, contrast, seed):
    r = ObjectRecipe(kind, size=size, phase_range=phase_range, amplitude_min=amp_min,
                     amplitude_contrast=contrast, smoothness=2.0, blob_radius=3.0, seed=seed)
    obj = generate(r)
    assert obj.phase.min() == 0 and obj.phase.max() == pytest.approx(phase_range, rel=1e-15)
    if kind is ObjectKind.COMPLEX_STRUCTURED:
        assert obj.amplitude.min() == pytest.approx(amp_min, rel=1e-12)
        assert obj.amplitude.max() == pytest.approx(amp_min * contrast, rel=1e-12)
    else:
        np.testing.assert_array_equal(obj.amplitude, 1)


@pytest.mark.parametrize("kwargs", [
    {"kind": "spiral"},
    {"size": 7},
    {"size": 2},
    {"phase_range": -1.0},
    {"amplitude_min": 0.0},
    {"amplitude_contrast": 0.5},
    {"smoothness": 0.0},
    {"topological_number": 1.5},
    {"blob_count": -1},
    {"vortex_radius": 0.0},
])
def test_invalid_recipes(kwargs):
    with pytest.raises(ValueError):
        ObjectRecipe(**kwargs)


def test_winding_radius_checked():
    with pytest.raises(ValueError):
        winding_number(np.zeros((16, 16)), 8)
