import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from sdfcomp.affinity import AffinityField, GridSpec, KernelParams, field_for_solid
from sdfcomp.correlation import (
    IncompatibleFieldsError,
    Pose,
    correlate,
    global_top_k,
    landscape_sweep,
    quat_angle,
    real_score,
    resample_rotated,
    rotation_error,
    sample_rotations,
    score_direct,
    super_fibonacci,
    translation_error,
    translation_landscape,
    write_top_k,
)
from sdfcomp.geometry import shapes

BASE = KernelParams(sigma=0.5, lambda1=1.0, lambda2=3.0, eps=1.5)


def _field(data, origin, h=1.0, params=BASE):
    data = np.asarray(data, dtype=np.complex128)
    return AffinityField(GridSpec(origin, h, data.shape), data, params, "test")


def _random_field(rng, shape, origin, h=1.0):
    return _field(rng.normal(size=shape) + 1j * rng.normal(size=shape), origin, h)


@pytest.fixture(scope="module")
def example3_fields():
    pair = shapes.example_pair(3)
    f1 = field_for_solid(pair.fixed, BASE, 0.1, 1.0)
    f2 = field_for_solid(pair.moving, BASE, 0.1, 1.0)
    return pair, f1, f2


# --- correlate --------------------------------------------------------------

def test_correlate_matches_brute_force():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    b = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    c = correlate(a, b)
    assert c.shape == (15, 15)
    ref = np.zeros((15, 15), dtype=complex)
    for k0, k1 in itertools.product(range(-7, 8), repeat=2):
        s = 0j
        for i0, i1 in itertools.product(range(8), repeat=2):
            j0, j1 = i0 - k0, i1 - k1
            if 0 <= j0 < 8 and 0 <= j1 < 8:
                s += a[i0, i1] * b[j0, j1]
        ref[k0 + 7, k1 + 7] = s
    assert np.max(np.abs(c - ref)) <= 1e-10


def test_correlate_3d_brute_force():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(3, 4, 2)) + 0j
    b = rng.normal(size=(2, 3, 2)) * 1j
    c = correlate(a, b)
    for k in itertools.product(range(-1, 3), range(-2, 4), range(-1, 2)):
        s = 0j
        for i in itertools.product(*[range(n) for n in a.shape]):
            j = tuple(ii - kk for ii, kk in zip(i, k))
            if all(0 <= jj < n for jj, n in zip(j, b.shape)):
                s += a[i] * b[j]
        assert c[tuple(kk + n - 1 for kk, n in zip(k, b.shape))] == pytest.approx(s, abs=1e-12)


# --- score_direct -----------------------------------------------------------

def test_real_score():
    assert real_score(1 + 2j) == 1.0


def test_disjoint_supports_score_zero():
    rng = np.random.default_rng(2)
    f1 = _random_field(rng, (5, 5), (0.0, 0.0))
    f2 = _random_field(rng, (5, 5), (0.0, 0.0))
    assert score_direct(f1, f2, Pose([100.0, 0.0], 0.0)) == 0


def test_self_overlap_of_interior_is_penalty():
    S = shapes.rectangle(4.0, 4.0)
    f = field_for_solid(S, BASE, 0.2, 0.0)
    assert score_direct(f, f, Pose.identity(2)).real < 0


def test_reward_and_collision_signs():
    # purely exterior (-i lambda1) against purely interior (+i lambda2) values
    ext = _field(np.full((4, 4), -1j), (0.0, 0.0))
    inn = _field(np.full((4, 4), 3j), (0.0, 0.0))
    assert real_score(score_direct(ext, inn, Pose.identity(2))) == pytest.approx(48.0)
    assert real_score(score_direct(inn, inn, Pose.identity(2))) == pytest.approx(-144.0)


def test_score_identity_pose_is_plain_sum():
    rng = np.random.default_rng(3)
    f1 = _random_field(rng, (6, 7), (0.0, 0.0), 0.5)
    f2 = _random_field(rng, (6, 7), (0.0, 0.0), 0.5)
    got = score_direct(f1, f2, Pose.identity(2))
    assert got == pytest.approx(np.sum(f1.data * f2.data) * 0.25, rel=1e-12)


def test_incompatible_spacing():
    rng = np.random.default_rng(4)
    f1 = _random_field(rng, (4, 4), (0.0, 0.0), 1.0)
    f2 = _random_field(rng, (4, 4), (0.0, 0.0), 0.5)
    with pytest.raises(IncompatibleFieldsError):
        score_direct(f1, f2, Pose.identity(2))
    with pytest.raises(IncompatibleFieldsError):
        translation_landscape(f1, f2, 0.0)


@given(alpha=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       x=st.floats(-2, 2), th=st.floats(-1, 1))
@settings(max_examples=25, deadline=None)
def test_linearity(alpha, x, th):
    rng = np.random.default_rng(5)
    f1 = _random_field(rng, (6, 6), (-3.0, -3.0))
    f2 = _random_field(rng, (5, 5), (-2.0, -2.0))
    g1 = _field(alpha * f1.data, f1.origin)
    p = Pose([x, 0.3], th)
    assert score_direct(g1, f2, p) == pytest.approx(alpha * score_direct(f1, f2, p),
                                                   rel=1e-9, abs=1e-9)


# --- FFT landscape ----------------------------------------------------------

def test_delta_spike_reproduces_f1():
    rng = np.random.default_rng(6)
    f1 = _random_field(rng, (6, 5), (1.0, 2.0))
    spike = np.zeros((3, 3), dtype=complex)
    spike[1, 1] = 1.0
    f2 = _field(spike, (-1.0, -1.0))
    L = translation_landscape(f1, f2, 0.0)
    for idx in itertools.product(range(6), range(5)):
        t = f1.origin + np.array(idx, dtype=float)
        assert L.value_at(Pose(t, 0.0)) == pytest.approx(f1.data[idx], abs=1e-12)


def test_fft_matches_direct_on_random_fields():
    rng = np.random.default_rng(7)
    f1 = _random_field(rng, (12, 10), (-6.0, -5.0), 0.5)
    f2 = _random_field(rng, (7, 9), (-1.5, -2.0), 0.5)
    for theta in (0.0, 0.4):
        L = translation_landscape(f1, f2, theta)
        m = np.abs(L.scores).max()
        for idx in itertools.product(range(0, L.grid.dims[0], 3), range(0, L.grid.dims[1], 2)):
            d = score_direct(f1, f2, L.pose_at(idx))
            assert abs(L.scores[idx] - d) <= 1e-6 * m


def test_fft_matches_direct_3d():
    rng = np.random.default_rng(8)
    f1 = _random_field(rng, (6, 5, 4), (-3.0, -2.0, -2.0))
    f2 = _random_field(rng, (4, 4, 3), (-2.0, -2.0, -1.0))
    q = super_fibonacci(5)[2]
    L = translation_landscape(f1, f2, q)
    m = np.abs(L.scores).max()
    for idx in itertools.product(*[range(0, n, 2) for n in L.grid.dims]):
        assert abs(L.scores[idx] - score_direct(f1, f2, L.pose_at(idx))) <= 1e-6 * m


def test_translation_equivariance():
    rng = np.random.default_rng(9)
    f1 = _random_field(rng, (8, 8), (0.0, 0.0))
    f2 = _random_field(rng, (4, 4), (-2.0, -2.0))
    f2s = _field(f2.data, f2.origin + [1.0, 0.0])
    a = translation_landscape(f1, f2, 0.0)
    b = translation_landscape(f1, f2s, 0.0)
    assert np.allclose(a.grid.origin - [1.0, 0.0], b.grid.origin)
    assert np.allclose(a.scores, b.scores)


def test_resample_rotated_quarter_turn_is_exact():
    rng = np.random.default_rng(10)
    f = _random_field(rng, (5, 5), (-2.0, -2.0))
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    g = resample_rotated(f, R)
    assert np.allclose(g.data, np.rot90(f.data), atol=1e-12)


def test_example3_fft_matches_direct_at_random_pose(example3_fields):
    pair, f1, f2 = example3_fields
    rng = np.random.default_rng(11)
    theta = 0.3
    L = translation_landscape(f1, f2, theta)
    m = np.abs(L.scores).max()
    for _ in range(5):
        t = rng.uniform(-1.0, 1.0, 2) + [0.0, -0.5]
        snapped = L.pose_at(L.index_of(Pose(t, theta)))
        assert abs(L.value_at(snapped) - score_direct(f1, f2, snapped)) <= 1e-6 * m


def test_example3_argmax_near_fit(example3_fields):
    pair, f1, f2 = example3_fields
    L = translation_landscape(f1, f2, 0.0)
    pose, _ = L.argmax()
    assert translation_error(pose, Pose.from_vector(pair.reference)) <= f1.spacing * math.sqrt(2)


@pytest.mark.parametrize("case", ["example1", "disc_in_u"])
def test_argmax_stable_under_penalty_scaling(case):
    if case == "example1":
        pair = shapes.example_pair(1)
        fixed, moving = pair.fixed, pair.moving
    else:
        # a disc resting in the U socket with clearance: a collision-free optimum
        fixed = shapes.example_pair(3).fixed
        moving = shapes.circle(0.6, max_chord=0.05)
    fits = []
    for p in (3.0, 10.0):
        k = BASE.with_penalty(p)
        f1 = field_for_solid(fixed, k, 0.1, 1.0)
        f2 = field_for_solid(moving, k, 0.1, 1.0)
        fits.append(translation_landscape(f1, f2, 0.0).argmax()[0])
    assert translation_error(*fits) <= 1e-12


def test_landscape_capacity():
    from sdfcomp.affinity import CapacityError

    rng = np.random.default_rng(12)
    f1 = _random_field(rng, (20, 20), (0.0, 0.0))
    with pytest.raises(CapacityError):
        translation_landscape(f1, f1, 0.0, max_nodes=100)


def test_sweep_top_k_and_outputs(tmp_path):
    rng = np.random.default_rng(13)
    f1 = _random_field(rng, (10, 10), (0.0, 0.0))
    f2 = _random_field(rng, (4, 4), (-2.0, -2.0))
    rots = sample_rotations(3, 2)
    Ls = landscape_sweep(f1, f2, rots)
    Lt = landscape_sweep(f1, f2, rots, threads=3)
    for a, b in zip(Ls, Lt):
        assert np.array_equal(a.scores, b.scores)
    top = global_top_k(Ls, 5)
    scores = [s for _, s in top]
    assert scores == sorted(scores, reverse=True)
    assert scores[0] == max(L.argmax()[1] for L in Ls)
    write_top_k(tmp_path / "top.json", top)
    rows = json.loads((tmp_path / "top.json").read_text())
    assert [r["rank"] for r in rows] == [1, 2, 3, 4, 5]
    Ls[0].write_csv(tmp_path / "l.csv")
    lines = (tmp_path / "l.csv").read_text().splitlines()
    assert lines[0].startswith("# rotation") and lines[1] == "tx,ty,re,im"
    assert len(lines) == 2 + Ls[0].grid.size
    Ls[0].write_csv(tmp_path / "p.csv", {1: 3.0})
    assert len((tmp_path / "p.csv").read_text().splitlines()) == 2 + Ls[0].grid.dims[0]


# --- poses and rotation samples ---------------------------------------------

def test_sample_rotations_2d():
    assert sample_rotations(1, 2) == [0.0]
    a = sample_rotations(8, 2)
    assert a[0] == pytest.approx(-math.pi / 4) and a[-1] == pytest.approx(math.pi / 4)
    assert np.allclose(np.diff(a), math.pi / 14)
    with pytest.raises(ValueError):
        sample_rotations(0, 2)


def test_sample_rotations_3d_spread_and_seed():
    q = np.array(sample_rotations(100, 3))
    assert np.allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-9)
    dmin = min(quat_angle(a, b) for a, b in itertools.combinations(q, 2))
    # packing bound: 100 geodesic balls of radius d/2 fit in SO(3) (normalized volume 1)
    bound = 2 * brentq(lambda x: x - math.sin(x) - math.pi / 100, 1e-6, 3.0)
    assert dmin >= bound / 2
    a = np.array(sample_rotations(10, 3, seed=5))
    b = np.array(sample_rotations(10, 3, seed=5))
    c = np.array(sample_rotations(10, 3, seed=6))
    assert np.array_equal(a, b) and not np.allclose(a, c)


def _random_pose(rng, dim):
    if dim == 2:
        return Pose(rng.normal(size=2), rng.uniform(-math.pi, math.pi))
    q = rng.normal(size=4)
    return Pose(rng.normal(size=3), q / np.linalg.norm(q))


@pytest.mark.parametrize("dim", [2, 3])
def test_pose_group_axioms(dim):
    rng = np.random.default_rng(14)
    pts = rng.normal(size=(5, dim))
    for _ in range(20):
        a, b, c = (_random_pose(rng, dim) for _ in range(3))
        assert np.allclose(a.compose(b).compose(c).apply(pts), a.compose(b.compose(c)).apply(pts))
        assert np.allclose(a.compose(a.inverse()).apply(pts), pts)
        assert np.allclose(a.apply_inverse(a.apply(pts)), pts)
        if dim == 3:
            assert abs(np.linalg.norm(a.compose(b).rotation) - 1.0) <= 1e-9


def test_pose_vectors_and_errors():
    p = Pose.from_vector([1.0, 2.0, 0.5])
    assert np.allclose(p.as_vector(), [1.0, 2.0, 0.5])
    q = Pose.from_vector([0, 0, 0, 0, 0, 0, 2.0])
    assert np.allclose(q.rotation, [0, 0, 0, 1])
    assert rotation_error(Pose([0, 0], 3.1), Pose([0, 0], -3.1)) == pytest.approx(2 * math.pi - 6.2)
    assert rotation_error(Pose.identity(3), q) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        Pose.from_vector([1.0, 2.0])
    with pytest.raises(ValueError):
        Pose(np.zeros(3), np.array([2.0, 0, 0, 0]))


def test_perturbed_matches_stepped():
    rng = np.random.default_rng(15)
    p = _random_pose(rng, 3)
    for k in range(6):
        e = np.zeros(6)
        e[k] = 0.01
        a, b = p.perturbed(k, 0.01), p.stepped(e)
        assert translation_error(a, b) < 1e-15 and rotation_error(a, b) < 1e-7
