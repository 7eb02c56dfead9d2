import math

import numpy as np
import pytest

from p6dyn import cohomology as coh
from p6dyn.ergodic import (
    count_consistency,
    find_fixed_points,
    iterate_orbit,
    lyapunov,
)
from p6dyn.params import kappa_params, kappa_to_b
from p6dyn.surface import f_eval, random_surface_point, word_apply
from p6dyn.words import CoxeterWord

EIGHT = (1, 2, 3, 2)
COXETER = (1, 2, 3)
POCHHAMMER = (1, 2, 3, 1, 2, 3)


def _bounded_seed(theta, rng, word=EIGHT):
    for _ in range(100):
        x = random_surface_point(theta, rng, real=True)
        if not iterate_orbit(word, x, theta, 300).escaped:
            return x
    raise RuntimeError("no bounded seed found")


def test_orbit_zero_steps(theta_star, rng):
    x = random_surface_point(theta_star, rng)
    rec = iterate_orbit(EIGHT, x, theta_star, 0)
    assert rec.samples.shape == (1, 3)
    assert not rec.escaped


def test_orbit_stays_on_surface(theta_star, rng):
    x = _bounded_seed(theta_star, rng)
    rec = iterate_orbit(EIGHT, x, theta_star, 2000)
    assert not rec.escaped
    assert rec.max_f_drift < 1e-9


def test_elementary_orbit_preserves_fibration(theta_star, rng):
    # (s1 s2) = g_3^2 up to convention; it preserves f and the x-coordinate
    # untouched by both involutions stays bounded in modulus on the real part
    x = random_surface_point(theta_star, rng, real=True)
    rec = iterate_orbit((1, 2), x, theta_star, 50)
    assert rec.max_f_drift < 1e-9
    assert np.abs(rec.samples[:, 2] - x[2]).max() < 1e-12  # x3 is invariant


def test_orbit_reversibility(theta_star, rng):
    w = CoxeterWord(EIGHT)
    for _ in range(5):
        x = _bounded_seed(theta_star, rng)
        rec = iterate_orbit(w, x, theta_star, 20)
        assert not rec.escaped
        end = rec.samples[-1]
        back = end.copy()
        inv = tuple(reversed(EIGHT))
        for _ in range(20):
            back = word_apply(inv, back, theta_star)
        assert np.abs(back - x).max() < 1e-6


def test_orbit_escape_flagged(theta_star):
    x = np.array([1e7 + 0j, 1e7, 1e7])
    rec = iterate_orbit(EIGHT, x, theta_star, 50)
    assert rec.escaped and rec.escape_step is not None
    assert len(rec.samples) >= 1  # partial record retained


def test_lyapunov_area_pairing(theta_star, rng):
    x = _bounded_seed(theta_star, rng)
    est = lyapunov(EIGHT, x, theta_star, 3000)
    assert est.reliable
    assert est.L_plus > 0
    assert abs(est.L_plus + est.L_minus) < 1e-3


def test_lyapunov_elementary_word(theta_star, rng):
    x = _bounded_seed(theta_star, rng, word=(1, 2))
    est = lyapunov((1, 2), x, theta_star, 4000)
    assert abs(est.L_plus) < 1e-2  # polynomial degree growth only


def test_lyapunov_stride_insensitive(theta_star, rng):
    x = _bounded_seed(theta_star, rng)
    e1 = lyapunov(EIGHT, x, theta_star, 3000, renorm_stride=1)
    e5 = lyapunov(EIGHT, x, theta_star, 3000, renorm_stride=5)
    assert abs(e1.L_plus - e5.L_plus) < 1e-3


def test_lyapunov_bound_diagnostic(theta_star, rng):
    # Monte Carlo over bounded real seeds; diagnostic per the loose theory
    # bound L+ >= log(lambda)/8 which holds almost surely for the natural
    # invariant measure, not for Lebesgue draws; report, do not gate hard
    bound = math.log(3 + 2 * math.sqrt(2)) / 8
    hits = total = 0
    while total < 20:
        x = random_surface_point(theta_star, rng, real=True)
        est = lyapunov(EIGHT, x, theta_star, 1500)
        if not est.reliable or est.n_steps < 1500:
            continue
        total += 1
        hits += est.L_plus >= bound
    fraction = hits / total
    print(f"L+ >= (1/8) log lambda fraction: {fraction:.2f}")
    assert 0.0 <= fraction <= 1.0
    assert hits > 0  # the bounded component is genuinely hyperbolic here


def test_lyapunov_escape_unreliable(theta_star):
    x = np.array([3.0 + 2.0j, -4.0, 5.0])
    est = lyapunov(EIGHT, x, theta_star, 500)
    assert not est.reliable


def test_fixed_points_eight_loop(theta_star, b_star):
    fps = find_fixed_points(EIGHT, 1, theta_star, starts=2000, seed=3, b=b_star)
    assert fps.count == 10
    for pt, res in zip(fps.points, fps.residuals):
        moved = word_apply(EIGHT, pt, theta_star)
        assert np.abs(moved - pt).max() < 1e-10 * (1 + np.abs(pt).max())
        assert abs(f_eval(pt, theta_star)) < 1e-9 * (1 + np.abs(pt).max() ** 3)
    # count never exceeds the exact formula
    assert fps.count <= coh.periodic_count(EIGHT, 1)[0]
    # pairwise separation at the dedupe scale
    for i in range(fps.count):
        for j in range(i):
            d = np.abs(fps.points[i] - fps.points[j]).max()
            assert d > fps.tol_dedupe


def test_fixed_points_coxeter_empty(theta_star, b_star):
    fps = find_fixed_points(COXETER, 1, theta_star, starts=1000, seed=5, b=b_star)
    assert fps.count == 0  # valid outcome, not an error


def test_fixed_point_set_invariance(theta_star):
    fps = find_fixed_points(EIGHT, 1, theta_star, starts=2000, seed=7)
    pts = np.array(fps.points)
    for pt in pts:
        moved = word_apply(EIGHT, pt, theta_star)
        dist = np.abs(pts - moved).max(axis=1).min()
        assert dist < 1e-6


def test_period_one_inside_period_two(theta_star):
    one = find_fixed_points(EIGHT, 1, theta_star, starts=2000, seed=11)
    two = find_fixed_points(EIGHT, 2, theta_star, starts=3000, seed=11)
    assert two.count == 38
    pts2 = np.array(two.points)
    for pt in one.points:
        assert np.abs(pts2 - pt).max(axis=1).min() < 1e-6


def test_fixed_points_preconditions(theta_star):
    with pytest.raises(coh.ElementaryWordError):
        find_fixed_points((1, 2, 1, 2), 1, theta_star)
    with pytest.raises(coh.NotAnalyticallyStableError):
        find_fixed_points((1, 2, 1), 1, theta_star)


def test_fixed_points_refuses_singular_surface(theta_star):
    b_wall = kappa_to_b(kappa_params(0.25, 0.0, 0.125, 0.125, 0.25))
    with pytest.raises(ValueError, match="discriminant"):
        find_fixed_points(EIGHT, 1, theta_star, b=b_wall)


def test_count_consistency_eight_loop(theta_star, b_star):
    rows = count_consistency(EIGHT, theta_star, 2, starts=2000, seed=1, b=b_star)
    assert [(r.period, r.formula_affine, r.found) for r in rows] == [
        (1, 10, 10),
        (2, 38, 38),
    ]
    assert all(r.deficit == 0 and r.excess == 0 for r in rows)


def test_count_consistency_rejects_elementary(theta_star):
    with pytest.raises(coh.ElementaryWordError):
        count_consistency((1, 2), theta_star, 1)
