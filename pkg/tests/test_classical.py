import math

import numpy as np
import pytest

from dkt.params import transform_params, params_from_radial
from dkt.sphere import area_uniform_grid, point_from_angles
from dkt import classical
from dkt.classical import (classify_fixed_point, find_fixed_points, ks_entropy,
                           largest_lyapunov, lyapunov_field, map_step,
                           map_trajectory, period2_orbit, period4_stable,
                           phase_averaged_chaos, phase_portrait, reflect_x,
                           reflect_y, symmetry_residuals, tangent_matrix,
                           FixedPointRecord)

SQRT2PI = math.sqrt(2) * math.pi


def rotation(axis, ang):
    c, s = math.cos(ang), math.sin(ang)
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
    if axis == "z":
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rotation_oracle(p, params):
    """Precession about y, z-torsion by k*Z, x-torsion by k'*X, stagewise."""
    p1 = rotation("y", params.p) @ p
    p2 = rotation("z", params.k * p1[2]) @ p1
    return rotation("x", params.k_prime * p2[0]) @ p2


def random_sphere(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class TestMapStep:
    def test_zero_kick_quarter_turn(self):
        p = map_step([0.0, 0.0, 1.0], transform_params(0.0, 0.0))
        assert np.abs(p - [1.0, 0.0, 0.0]).max() < 1e-15

    def test_poles_invariant(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            params = transform_params(*rng.uniform(-8, 8, 2))
            for pole in ([0.0, 1.0, 0.0], [0.0, -1.0, 0.0]):
                assert np.abs(map_step(pole, params) - pole).max() < 1e-15

    def test_matches_rotation_composition(self):
        rng = np.random.default_rng(1)
        params = transform_params(2.0, 1.0)
        z = math.sqrt(0.66)
        p = np.array([0.3, 0.5, z]) / np.linalg.norm([0.3, 0.5, z])
        assert np.abs(map_step(p, params) - rotation_oracle(p, params)).max() <= 1e-12
        for _ in range(200):
            p = random_sphere(rng, 1)[0]
            params = transform_params(*rng.uniform(-5, 5, 2))
            assert np.abs(map_step(p, params) - rotation_oracle(p, params)).max() <= 1e-12

    def test_norm_preserved_long_run(self):
        params = transform_params(2.7, 1.3)
        traj = map_trajectory([0.3, 0.5, math.sqrt(0.66)], params, 20000)
        norms = np.linalg.norm(traj, axis=1)
        assert np.abs(norms - 1).max() <= 1e-9

    def test_non_unit_input_rejected(self):
        with pytest.raises(ValueError):
            map_step([1.0, 1.0, 0.0], transform_params(1, 1))


class TestTangentMatrix:
    def test_zero_kick_rotation_block(self):
        m = tangent_matrix([0.2, 0.5, math.sqrt(0.71)], transform_params(0, 0))
        ref = np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]], dtype=float)
        assert np.abs(m - ref).max() < 1e-14

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(2)
        h = 1e-6
        worst = 0.0
        for _ in range(1000):
            p = random_sphere(rng, 1)[0]
            params = transform_params(*rng.uniform(-4, 4, 2))
            m = tangent_matrix(p, params)
            fd = np.empty((3, 3))
            for col in range(3):
                e = np.zeros(3)
                e[col] = h
                fp = classical._step_arrays(*(p + e), params.k, params.k_prime)
                fm = classical._step_arrays(*(p - e), params.k, params.k_prime)
                fd[:, col] = (np.array(fp) - np.array(fm)) / (2 * h)
            worst = max(worst, np.abs(m - fd).max())
        assert worst <= 1e-6

    def test_determinant_one(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = random_sphere(rng, 1)[0]
            params = transform_params(*rng.uniform(-4, 4, 2))
            assert abs(np.linalg.det(tangent_matrix(p, params)) - 1) <= 1e-10


class TestLyapunov:
    def test_pure_rotation_is_regular(self):
        lam = largest_lyapunov([0.3, 0.5, math.sqrt(0.66)],
                               transform_params(0, 0), 1000)
        assert abs(lam) <= 1e-6

    def test_near_integrable_regime(self):
        lam = largest_lyapunov(point_from_angles(1.1, 0.6),
                               params_from_radial(0.1, 0.0), 2000)
        assert lam <= 0.01

    def test_chaotic_sea_value(self):
        lam = largest_lyapunov(point_from_angles(2.0, 2.5),
                               params_from_radial(1.5, 0.0), 1500)
        assert abs(lam - 0.4) <= 0.1

    def test_kse_identity_with_lle(self):
        p = point_from_angles(2.0, 2.5)
        params = params_from_radial(1.7, 0.4)
        lam = largest_lyapunov(p, params, 2000)
        h = ks_entropy(p, params, 2000)
        assert abs(h - lam / math.log(2)) <= 1e-9

    def test_ry_conjugation_invariance(self):
        params = params_from_radial(1.5, 0.3)
        p = point_from_angles(2.0, 2.5)
        a = largest_lyapunov(p, params, 4000)
        b = largest_lyapunov(reflect_y(p), params, 4000)
        assert abs(a - b) <= 0.02 * max(abs(a), abs(b))

    def test_minimum_kick_count(self):
        with pytest.raises(ValueError):
            largest_lyapunov([0, 1, 0], transform_params(1, 1), 50)
        with pytest.raises(ValueError):
            ks_entropy([0, 1, 0], transform_params(1, 1), 500)


class TestPhasePortrait:
    def test_fixed_point_is_constant(self):
        traj = phase_portrait(transform_params(2.3, 0.7),
                              np.array([[0.0, 1.0, 0.0]]), 50)
        assert np.abs(traj[0] - traj[0][0]).max() < 1e-12

    def test_regular_regime_bounded(self):
        th, ph = np.meshgrid(np.linspace(0.3, 2.8, 10),
                             np.linspace(-3, 3, 10), indexing="ij")
        pts = point_from_angles(th.ravel(), ph.ravel())
        traj = phase_portrait(params_from_radial(0.75, 0.0), pts, 200)
        assert np.isfinite(traj).all()
        assert traj[..., 0].min() >= 0 and traj[..., 0].max() <= math.pi

    def test_counter_kick_suppresses_chaos(self):
        # k' = -k puts every trajectory on an invariant curve
        params = transform_params(3.0, -3.0)
        pts = area_uniform_grid(7)
        lams = lyapunov_field(pts, params, 3000)
        assert lams.max() <= 0.05

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            phase_portrait(transform_params(1, 1), np.empty((0, 3)), 10)


class TestFixedPoints:
    @pytest.mark.parametrize("split", ["kprime0", "ktheta0"])
    @pytest.mark.parametrize("s,expect_nontrivial", [
        (1.5, False), (1.9, False), (2.05, True), (3.0, True)])
    def test_onset_threshold(self, split, s, expect_nontrivial):
        params = (transform_params(s, 0.0) if split == "kprime0"
                  else params_from_radial(s / 2, 0.0))
        recs = find_fixed_points(params)
        nontrivial = [r for r in recs if r.branch != "trivial"]
        assert bool(nontrivial) == expect_nontrivial
        assert len([r for r in recs if r.branch == "trivial"]) == 2

    def test_known_root_location(self):
        # k + k' = 3 with k_theta = 0: root of sin^2(1.5 X)/(1+sin^2) = X^2
        params = params_from_radial(1.5, 0.0)
        up = [r for r in find_fixed_points(params)
              if r.branch == "nontrivial-upper"]
        assert len(up) == 1
        x, y, z = up[0].point
        assert abs(x - 0.6297) < 5e-4
        assert abs(z) < 1e-12
        assert abs(y - x / math.sin(1.5 * x)) < 1e-9

    def test_map_invariance_and_unit_multiplier(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            params = params_from_radial(rng.uniform(1.1, 3.0), rng.uniform(-1, 1))
            for rec in find_fixed_points(params):
                assert np.abs(map_step(rec.point, params) - rec.point).max() <= 1e-9
                assert np.min(np.abs(rec.multipliers - 1.0)) <= 1e-8

    def test_pole_stability_flips_at_onset(self):
        stable = classify_fixed_point(
            FixedPointRecord(point=np.array([0.0, 1.0, 0.0])),
            params_from_radial(0.75, 0.0))
        assert stable.stable
        unstable = classify_fixed_point(
            FixedPointRecord(point=np.array([0.0, 1.0, 0.0])),
            params_from_radial(1.5, 0.0))
        assert not unstable.stable

    @pytest.mark.parametrize("s,stable", [(4.0, True), (4.6, False)])
    def test_nontrivial_stability_window(self, s, stable):
        # stable until k + k' reaches sqrt(2) pi = 4.443
        params = transform_params(s, 0.0)
        up = [r for r in find_fixed_points(params)
              if r.branch == "nontrivial-upper"]
        assert up and up[0].stable == stable

    def test_classify_rejects_non_fixed_point(self):
        with pytest.raises(ValueError):
            classify_fixed_point(
                FixedPointRecord(point=np.array([1.0, 0.0, 0.0])),
                transform_params(2.0, 1.0))


class TestPeriod2:
    def test_below_threshold_rejected(self):
        with pytest.raises(ValueError):
            period2_orbit(transform_params(4.0, 0.0))

    def test_birth_at_equator_of_formula(self):
        s = SQRT2PI * (1 + 1e-6)
        p1, p2 = period2_orbit(transform_params(s, 0.0))
        assert abs(p1[1]) < 2e-3 and abs(p2[1]) < 2e-3

    @pytest.mark.parametrize("s", [4.6, 6.0])
    def test_two_cycle_under_map(self, s):
        params = transform_params(s, 0.0)
        p1, p2 = period2_orbit(params)
        f1 = map_step(p1, params)
        f2 = map_step(f1, params)
        assert np.abs(f1 - p2).max() <= 1e-9
        assert np.abs(f2 - p1).max() <= 1e-9

    def test_known_values(self):
        p1, _ = period2_orbit(transform_params(4.6, 0.0))
        assert abs(p1[0] - 0.68295) < 1e-4
        assert abs(p1[0] + p1[2]) < 1e-15
        assert abs(p1[1] - math.sqrt(1 - 2 * math.pi**2 / 4.6**2)) < 1e-12


class TestPeriod4:
    def test_stable_at_two(self):
        params = params_from_radial(1.0, 0.0)
        assert period4_stable(params)
        # the equatorial 4-cycle is traced by the map
        cycle = [np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]),
                 np.array([0.0, 0.0, -1.0]), np.array([-1.0, 0.0, 0.0])]
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            assert np.abs(map_step(a, params) - b).max() < 1e-12

    def test_unstable_at_four(self):
        assert not period4_stable(params_from_radial(2.0, 0.0))

    def test_small_kick_limit(self):
        # k + k' -> 0: parabolic boundary (monodromy trace -> 2, and the
        # compact criterion value -> 4); the boundary counts as unstable,
        # any small positive kick is elliptic
        from dkt.classical import period4_criterion_value, period4_monodromy_trace
        assert not period4_stable(transform_params(0.0, 0.0))
        assert abs(period4_monodromy_trace(transform_params(0.0, 0.0)) - 2.0) < 1e-12
        assert abs(period4_criterion_value(transform_params(0.0, 0.0)) - 4.0) < 1e-12
        assert period4_stable(transform_params(0.2, 0.1))

    def test_monodromy_depends_on_sum_only(self):
        from dkt.classical import period4_monodromy_trace
        for s in (1.0, 3.2, 4.0, 6.0):
            a = period4_monodromy_trace(transform_params(s, 0.0))
            b = period4_monodromy_trace(params_from_radial(s / 2, 0.0))
            c = period4_monodromy_trace(transform_params(s / 3, 2 * s / 3))
            assert abs(a - b) < 1e-10 and abs(a - c) < 1e-10


class TestSymmetries:
    def test_residuals_tiny(self):
        rng = np.random.default_rng(5)
        pts = random_sphere(rng, 200)
        for _ in range(5):
            params = transform_params(*rng.uniform(-5, 5, 2))
            assert max(symmetry_residuals(params, pts)) <= 1e-12

    def test_reflections_are_involutions(self):
        rng = np.random.default_rng(6)
        pts = random_sphere(rng, 50)
        assert np.abs(reflect_x(reflect_x(pts)) - pts).max() == 0
        assert np.abs(reflect_y(reflect_y(pts)) - pts).max() == 0

    def test_quadrant_isomorphism(self):
        # trajectory at (k, k') equals the Ry(pi)-conjugated trajectory
        # at (-k, -k') started from the Ry(pi) image
        rng = np.random.default_rng(7)
        p = random_sphere(rng, 1)[0]
        a = map_trajectory(p, transform_params(2.2, 0.9), 100)
        b = map_trajectory(reflect_y(p), transform_params(-2.2, -0.9), 100)
        assert np.abs(reflect_y(b) - a).max() <= 1e-10

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            symmetry_residuals(transform_params(1, 1), np.empty((0, 3)))


class TestPhaseAverage:
    def test_deterministic_and_reasonable(self):
        params = params_from_radial(6.0, 0.0)
        a = phase_averaged_chaos(params, 60, 800, "lle")
        b = phase_averaged_chaos(params, 60, 800, "lle")
        assert a == b
        assert abs(a - math.log(6)) / math.log(6) <= 0.12

    def test_kse_vs_lle_base(self):
        params = params_from_radial(3.0, 0.0)
        lle = phase_averaged_chaos(params, 50, 1000, "lle")
        kse = phase_averaged_chaos(params, 50, 1000, "kse")
        assert abs(kse - lle / math.log(2)) <= 1e-9

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            phase_averaged_chaos(transform_params(1, 1), 10, 1000)
        with pytest.raises(ValueError):
            phase_averaged_chaos(transform_params(1, 1), 60, 1000, "bogus")
