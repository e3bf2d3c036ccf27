"""Acceptance criteria 1-8, each at its stated tolerance and runtime budget.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected in the pytest terminal summary.  Run alone with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from sdfcomp.affinity import (
    Ball,
    KernelParams,
    affinity_1d_oracle,
    affinity_at,
    affinity_many,
    field_for_solid,
    truncation_epsilon,
)
from sdfcomp.correlation import (
    Pose,
    sample_rotations,
    score_direct,
    translation_landscape,
)
from sdfcomp.geometry import contact_region, pmc_many, shapes, signed_distance
from sdfcomp.search import SearchConfig, loglog_slope, parameter_sweep, sample_starts, search_fields

pytestmark = pytest.mark.slow

BASE = KernelParams(sigma=0.5, lambda1=1.0, lambda2=3.0, eps=1.5)
# 3D quadrature refines to this spatial-angle increment (error ~1e-8 relative to 1e-4)
DGAMMA_3D = 1e-2


def _rigid(rng, dim):
    if dim == 2:
        a = rng.uniform(-math.pi, math.pi)
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    else:
        R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        R *= np.sign(np.linalg.det(R))
    return R, rng.uniform(-2, 2, dim)


# --- 1. truncation bound ----------------------------------------------------

def test_criterion_1_truncation_bound(acceptance_report):
    t0 = time.perf_counter()
    solids = [shapes.circle(1.0, max_chord=0.05), shapes.example_pair(1).fixed,
              shapes.icosphere(1.0, 2)]
    rng = np.random.default_rng(1)
    worst = 0.0  # largest |rho - rho_bar| / E_m
    for S in solids:
        lo, hi = S.bbox
        pts = rng.uniform(lo - 1.0, hi + 1.0, (200, S.dim))
        full_angle = 2 * math.pi if S.dim == 2 else 4 * math.pi
        for sigma in (0.25, 0.5):
            base = BASE.replace(sigma=sigma, eps=0.0)
            if S.dim == 3:
                base = base.replace(dgamma=DGAMMA_3D)
            full = affinity_many(pts, S, base)
            for E_m in (1e-3, 1e-5):
                eps = truncation_epsilon(base, E_m, full_angle)
                trunc = affinity_many(pts, S, base.replace(eps=eps))
                worst = max(worst, float(np.max(np.abs(full - trunc))) / E_m)
    wall = time.perf_counter() - t0
    ok = worst <= 1.0 and wall < 60
    assert acceptance_report(1, ok, f"max |rho - rho_bar| / E_m = {worst:.3g} over 3 shapes x "
                                    f"200 points x 4 settings; {wall:.1f}s")


# --- 2. analytic oracle -----------------------------------------------------

def test_criterion_2_oracle(acceptance_report):
    t0 = time.perf_counter()
    p3 = KernelParams(eps=0.0, dgamma=1e-3)
    xis = (-0.5, 0.5, 1.0)
    dirs = np.array([[0.3, 0.2, 0.93], [-0.6, 0.7, 0.2], [0.1, -0.9, -0.3]])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    levels = (1, 2, 3, 4)
    errs = []
    for lev in levels:
        S = shapes.icosphere(1.0, lev)
        e = 0.0
        for xi, d in zip(xis, dirs):
            want = affinity_1d_oracle(xi, Ball(1.0, 3), p3)
            e = max(e, abs(affinity_at(d * (1 + xi), S, p3) - want) / abs(want))
        errs.append(e)
    circle = shapes.circle(1.0, max_chord=0.02)
    p2 = KernelParams(eps=0.0)
    e2 = 0.0
    for xi in (-0.6, -0.2, 0.25, 1.0, 3.0):
        want = affinity_1d_oracle(xi, Ball(1.0, 2), p2)
        d = np.array([math.cos(0.4), math.sin(0.4)])
        e2 = max(e2, abs(affinity_at(d * (1 + xi), circle, p2) - want) / abs(want))
    wall = time.perf_counter() - t0
    converging = errs[-1] < errs[0]
    ok = converging and errs[-1] <= 0.02 and e2 <= 0.01 and wall < 60
    trend = " > ".join(f"{e:.2%}" for e in errs)
    assert acceptance_report(2, ok, f"icosphere levels {levels}: {trend}; circle {e2:.3%}; "
                                    f"{wall:.1f}s")


# --- 3. FFT correctness -----------------------------------------------------

def _brute_correlation(a, b):
    out = np.zeros([n1 + n2 - 1 for n1, n2 in zip(a.shape, b.shape)], dtype=complex)
    for k in itertools.product(*[range(-(n - 1), m) for m, n in zip(a.shape, b.shape)]):
        sa = tuple(slice(max(0, kk), min(m, n + kk)) for kk, m, n in zip(k, a.shape, b.shape))
        sb = tuple(slice(max(0, -kk), min(n, m - kk)) for kk, m, n in zip(k, a.shape, b.shape))
        out[tuple(kk + n - 1 for kk, n in zip(k, b.shape))] = np.sum(a[sa] * b[sb])
    return out


def test_criterion_3_fft(acceptance_report):
    from sdfcomp.affinity import AffinityField, GridSpec

    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    brute = 0.0
    for shape in ((8, 8), (8, 8, 8)):
        a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        b = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        fa = AffinityField(GridSpec(np.zeros(len(shape)), 1.0, shape), a, BASE, "a")
        fb = AffinityField(GridSpec(np.zeros(len(shape)), 1.0, shape), b, BASE, "b")
        L = translation_landscape(fa, fb, 0.0 if len(shape) == 2 else [1.0, 0, 0, 0])
        brute = max(brute, float(np.max(np.abs(L.scores - _brute_correlation(a, b)))))

    direct = 0.0
    n_poses = 0
    per_landscape = iter([9, 9, 8, 8, 8, 8])  # 50 poses over 3 examples x 2 rotations
    for k in (1, 2, 3):
        pair = shapes.example_pair(k)
        f1 = field_for_solid(pair.fixed, BASE, 0.1, 1.0)
        f2 = field_for_solid(pair.moving, BASE, 0.1, 1.0)
        for theta in rng.uniform(-math.pi / 4, math.pi / 4, 2):
            L = translation_landscape(f1, f2, theta)
            m = np.abs(L.scores).max()
            for _ in range(next(per_landscape)):
                idx = tuple(int(rng.integers(0, n)) for n in L.grid.dims)
                d = score_direct(f1, f2, L.pose_at(idx))
                direct = max(direct, abs(L.scores[idx] - d) / m)
                n_poses += 1
    wall = time.perf_counter() - t0
    ok = brute <= 1e-10 and direct <= 1e-6 and n_poses == 50 and wall < 120
    assert acceptance_report(3, ok, f"brute force max abs {brute:.2e}; direct max rel {direct:.2e} "
                                    f"at {n_poses} lattice poses; {wall:.1f}s")


# --- 4. multi-start reproduction --------------------------------------------

def test_criterion_4_reproduction(acceptance_report):
    t0 = time.perf_counter()
    pairs = {k: shapes.example_pair(k) for k in (1, 2, 3)}
    fixed = {k: field_for_solid(p.fixed, BASE, 0.05, 1.0) for k, p in pairs.items()}
    moving = {k: field_for_solid(p.moving, BASE, 0.05, 1.0) for k, p in pairs.items()}
    cfg = SearchConfig(n_starts=25, iterations=100, seed=0)
    best, rmse = {}, {}
    for i, j in itertools.product(pairs, pairs):
        ref = Pose.from_vector(pairs[i].reference) if i == j else None
        r = search_fields(fixed[i], moving[j], cfg, ref)
        best[i, j] = r.best.score
        if i == j:
            rmse[i] = (r.trans_rmse, r.rot_rmse)
    wall = time.perf_counter() - t0
    fit_ok = all(t <= 0.07 and a <= 0.01 for t, a in rmse.values())
    ratios = {(i, j): best[i, j] / min(best[i, i], best[j, j])
              for i, j in best if i != j}
    cross_ok = max(ratios.values()) <= 0.85
    ok = fit_ok and cross_ok and wall < 1800
    fits = "; ".join(f"ex{k} RMSE {t:.4f}/{a:.4f} rad" for k, (t, a) in rmse.items())
    worst = max(ratios, key=ratios.get)
    assert acceptance_report(4, ok, f"{fits}; worst cross ratio {ratios[worst]:.3f} "
                                    f"(fixed ex{worst[0]}, moving ex{worst[1]}); {wall:.0f}s")


# --- 5. parameter robustness ------------------------------------------------

def test_criterion_5_sweeps(acceptance_report):
    t0 = time.perf_counter()
    pair = shapes.example_pair(3)
    ref = Pose.from_vector(pair.reference)
    # finer than the search lattice: with multilinear interpolation relaxed
    # translations snap to lattice-aligned offsets, a bias of up to h/2
    h = 0.025
    cache = {}
    pen = parameter_sweep(pair.fixed, pair.moving, BASE, "penalty", [3.0, 5.0, 10.0], ref,
                          spacing=h, cache=cache)
    sig = parameter_sweep(pair.fixed, pair.moving, BASE, "sigma", [1.0, 0.5, 0.25, 0.1], ref,
                          spacing=h, cache=cache)
    wall = time.perf_counter() - t0

    def rmse(rows):
        return math.sqrt(sum(r.trans_err ** 2 for r in rows) / len(rows))

    change = max(abs(r.score - pen[0].score) for r in pen) / abs(pen[0].score)
    slope = loglog_slope(sig)
    ok = (change <= 0.15 and rmse(pen) <= 0.02 and abs(slope + 1) <= 0.3
          and rmse(sig) <= 0.02 and wall < 900)
    assert acceptance_report(5, ok, f"penalty score change {change:.2%}, RMSE {rmse(pen):.4f}; "
                                    f"sigma slope {slope:.3f}, RMSE {rmse(sig):.4f}; {wall:.0f}s")


# --- 6. sign structure ------------------------------------------------------

def test_criterion_6_signs(acceptance_report):
    t0 = time.perf_counter()
    pair = shapes.example_pair(3)
    f1 = field_for_solid(pair.fixed, BASE, 0.05, 1.0)
    f2 = field_for_solid(pair.moving, BASE, 0.05, 1.0)
    fit = score_direct(f1, f2, Pose.from_vector(pair.reference))
    collide = score_direct(f1, f2, Pose([0.0, -2.0], 0.0))  # peg wholly inside the block
    far = score_direct(f1, f2, Pose([20.0, 0.0], 0.0))
    wall = time.perf_counter() - t0
    ok = collide.real < 0 < fit.real and abs(far) < 1e-6 * abs(fit) and wall < 60
    assert acceptance_report(6, ok, f"collision Re f = {collide.real:.4g}, fit Re f = "
                                    f"{fit.real:.4g}, far |f| = {abs(far):.3g}; {wall:.1f}s")


# --- 7. SDF vs DSL landscape support ----------------------------------------

def test_criterion_7_support(acceptance_report):
    t0 = time.perf_counter()
    pair = shapes.example_pair_3d()
    params = BASE.replace(dgamma=DGAMMA_3D)
    h, margin = 0.125, 2.5
    ref = Pose.from_vector(pair.reference)
    L = {}
    for kind in ("sdf", "dsl"):
        f1 = field_for_solid(pair.fixed, params, h, margin, kind)
        f2 = field_for_solid(pair.moving, params, h, margin, kind)
        L[kind] = translation_landscape(f1, f2, [1.0, 0.0, 0.0, 0.0])
    wall = time.perf_counter() - t0
    # "nonzero" means above 1e-6 of the peak magnitude, the same cut as criterion 6
    support = {k: L[k].support_count(1e-6) for k in L}
    ratio = support["sdf"] / support["dsl"]
    pose, _ = L["sdf"].argmax()
    off = np.abs(pose.translation - ref.translation)

    def roughness(S):
        s = S.real
        return max(np.abs(np.diff(s, axis=a)).max() for a in range(3)) / np.abs(s).max()

    ok = ratio >= 2 and np.all(off <= h) and wall < 600
    assert acceptance_report(7, ok, f"support SDF {support['sdf']} vs DSL {support['dsl']} "
                                    f"(x{ratio:.2f}); SDF argmax offset {off.max():.3f} <= {h}; "
                                    f"max|diff|/max SDF {roughness(L['sdf'].scores):.3f} "
                                    f"DSL {roughness(L['dsl'].scores):.3f}; {wall:.0f}s")


# --- 8. invariant suites ----------------------------------------------------

def test_criterion_8_invariants(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    failures = []

    # isometry invariance of the affinity
    for S, p in ((shapes.example_pair(2).moving, BASE),
                 (shapes.icosphere(1.0, 2), BASE.replace(dgamma=DGAMMA_3D))):
        for _ in range(5):
            R, t = _rigid(rng, S.dim)
            pts = rng.uniform(-1.5, 1.5, (5, S.dim))
            a = affinity_many(pts, S, p)
            b = affinity_many(pts @ R.T + t, S.transformed(R, t), p)
            if not np.allclose(a, b, rtol=1e-6, atol=1e-9):
                failures.append("isometry")

    # congruence of signed distances and contact regions
    for S in (shapes.example_pair(1).fixed, shapes.icosphere(1.0, 1)):
        for _ in range(5):
            R, t = _rigid(rng, S.dim)
            T = S.transformed(R, t)
            for q in rng.uniform(-2.5, 2.5, (10, S.dim)):
                eps = float(rng.uniform(0, 2))
                if abs(signed_distance(R @ q + t, T).xi - signed_distance(q, S).xi) > 1e-9:
                    failures.append("distance congruence")
                if not np.array_equal(contact_region(R @ q + t, T, eps), contact_region(q, S, eps)):
                    failures.append("contact congruence")

    # point membership against analytic inside/outside
    q2 = rng.uniform(-2, 2, (2000, 2))
    q3 = rng.uniform(-2, 2, (2000, 3))
    r2, r3 = np.linalg.norm(q2, axis=1), np.linalg.norm(q3, axis=1)
    cases = [(shapes.circle(1.0, max_chord=0.05), q2, r2 < 1, r2 > 1),
             (shapes.rectangle(2.0, 1.0), q2, np.all(np.abs(q2) < [1.0, 0.5], axis=1),
              np.any(np.abs(q2) > [1.0, 0.5], axis=1)),
             (shapes.icosphere(1.0, 3), q3, r3 < 0.98, r3 > 1.0)]
    for S, q, inside, outside in cases:
        m = pmc_many(q, S)
        if not (np.all(m[inside] < 0) and np.all(m[outside] > 0)):
            failures.append(f"pmc {S.name}")

    # seeded determinism
    cfg = SearchConfig(n_starts=4, iterations=10, seed=11)
    pair = shapes.example_pair(1)
    f1 = field_for_solid(pair.fixed, BASE, 0.1, 1.0)
    f2 = field_for_solid(pair.moving, BASE, 0.1, 1.0)
    if search_fields(f1, f2, cfg).log() != search_fields(f1, f2, cfg).log():
        failures.append("search determinism")
    if not np.array_equal(sample_rotations(20, 3, seed=2), sample_rotations(20, 3, seed=2)):
        failures.append("rotation determinism")
    a = [p.as_vector() for p in sample_starts(cfg, 3)]
    b = [p.as_vector() for p in sample_starts(cfg, 3)]
    if not np.array_equal(a, b):
        failures.append("start determinism")
    g = field_for_solid(pair.fixed, BASE, 0.1, 1.0)
    if not np.array_equal(g.data, f1.data):
        failures.append("field determinism")

    wall = time.perf_counter() - t0
    ok = not failures
    detail = "all invariant checks pass" if ok else "failed: " + ", ".join(sorted(set(failures)))
    assert acceptance_report(8, ok, f"{detail}; {wall:.1f}s")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
