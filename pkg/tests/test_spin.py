import math

import numpy as np
import pytest

from dkt.params import KickParams, transform_params, params_from_radial
from dkt.sphere import point_from_angles, angles_from_point
from dkt.spin import (DimensionLimitError, build_collective_floquet,
                      build_qubit_floquet, build_spin_operators,
                      coherent_state, dicke_isometry)


def product_state(n_qubits, theta0, phi0):
    """Brute-force tensor product of identical qubits (oracle route)."""
    q = np.array([math.cos(theta0 / 2),
                  np.exp(-1j * phi0) * math.sin(theta0 / 2)])
    psi = q
    for _ in range(n_qubits - 1):
        psi = np.kron(psi, q)
    return psi


class TestKickParams:
    def test_transform_basic(self):
        p = transform_params(1.0, 0.0)
        assert p.k_r == 0.5 and p.k_theta == 0.5

    def test_chaos_minimising_pair(self):
        p = transform_params(3.0, -3.0)
        assert p.k_r == 0.0 and p.k_theta == 3.0

    def test_inverse_transform(self):
        p = params_from_radial(1.0, 0.25)
        assert p.k == 1.25 and p.k_prime == 0.75

    def test_round_trip_exact_on_representable_values(self):
        # sums and halves of these are exactly representable doubles, so the
        # transform round-trips bit-for-bit (general doubles round once)
        rng = np.random.default_rng(0)
        for _ in range(200):
            k, kp = np.round(rng.uniform(-10, 10, 2) * 2**20) / 2**20
            p = transform_params(k, kp)
            assert p.k_r + p.k_theta == k and p.k_r - p.k_theta == kp
            q = params_from_radial(p.k_r, p.k_theta)
            assert q.k == k and q.k_prime == kp

    def test_round_trip_one_ulp_on_random_doubles(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            k, kp = rng.uniform(-10, 10, 2)
            p = transform_params(k, kp)
            q = params_from_radial(p.k_r, p.k_theta)
            assert abs(q.k - k) <= np.spacing(abs(k))
            assert abs(q.k_prime - kp) <= np.spacing(abs(kp))

    def test_default_precession(self):
        assert transform_params(1, 2).p == math.pi / 2

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_nonfinite_rejected(self, bad):
        with pytest.raises(ValueError):
            transform_params(bad, 0.0)
        with pytest.raises(ValueError):
            params_from_radial(0.0, bad)


class TestSpinOperators:
    def test_spin_half_is_pauli_over_two(self):
        ops = build_spin_operators(0.5)
        sx = np.array([[0, 1], [1, 0]]) / 2
        sy = np.array([[0, -1j], [1j, 0]]) / 2
        sz = np.diag([0.5, -0.5])
        assert np.abs(ops.jx - sx).max() < 1e-15
        assert np.abs(ops.jy - sy).max() < 1e-15
        assert np.abs(ops.jz - sz).max() < 1e-15

    def test_spin_one_jz(self):
        ops = build_spin_operators(1)
        assert np.abs(ops.jz - np.diag([1.0, 0.0, -1.0])).max() < 1e-15

    @pytest.mark.parametrize("j", [0.5, 1, 1.5, 7, 50.5])
    def test_invariants(self, j):
        ops = build_spin_operators(j)
        dim = ops.dim
        for a in (ops.jx, ops.jy, ops.jz):
            assert np.abs(a - a.conj().T).max() <= 1e-13
        comm = ops.jx @ ops.jy - ops.jy @ ops.jx - 1j * ops.jz
        assert np.abs(comm).max() <= 1e-12 * dim
        comm = ops.jy @ ops.jz - ops.jz @ ops.jy - 1j * ops.jx
        assert np.abs(comm).max() <= 1e-12 * dim
        comm = ops.jz @ ops.jx - ops.jx @ ops.jz - 1j * ops.jy
        assert np.abs(comm).max() <= 1e-12 * dim
        casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
        assert np.abs(casimir - j * (j + 1) * np.eye(dim)).max() <= 1e-10

    def test_large_half_integer_commutator(self):
        ops = build_spin_operators(50.5)
        comm = ops.jx @ ops.jy - ops.jy @ ops.jx - 1j * ops.jz
        assert np.abs(comm).max() <= 1e-10

    @pytest.mark.parametrize("j", [0, -1, 0.3, 1.2])
    def test_bad_spin_rejected(self, j):
        with pytest.raises(ValueError):
            build_spin_operators(j)


class TestCoherentState:
    def test_polar_state(self):
        psi = coherent_state(3, 0.0, 0.0)
        assert abs(psi[0] - 1) < 1e-15 and np.abs(psi[1:]).max() == 0

    def test_antipolar_state(self):
        # cos(pi/2) rounds to ~6e-17, so the other amplitudes are merely tiny
        psi = coherent_state(1.5, math.pi, 0.5)
        assert np.abs(psi[:-1]).max() < 1e-15 and abs(abs(psi[-1]) - 1) < 1e-15

    def test_spin_half_equatorial(self):
        psi = coherent_state(0.5, math.pi / 2, -math.pi / 2)
        ref = np.array([1.0, 1j]) / math.sqrt(2)
        assert np.abs(psi - ref).max() < 1e-15

    def test_equatorial_expectations_vs_qubit_oracle(self):
        # j = 2 state (pi/2, -pi/2): <Jx> = <Jz> = 0 and |<Jy>| = j, matching
        # a brute-force 4-qubit tensor evaluation through the Dicke isometry
        j = 2.0
        ops = build_spin_operators(j)
        psi = coherent_state(j, math.pi / 2, -math.pi / 2)
        psi_q = product_state(4, math.pi / 2, -math.pi / 2)
        iso = dicke_isometry(4)
        assert np.abs(iso.conj().T @ psi_q - psi).max() < 1e-14
        ex = [np.vdot(psi, op @ psi).real for op in (ops.jx, ops.jy, ops.jz)]
        assert abs(ex[0]) < 1e-12 and abs(ex[2]) < 1e-12
        assert abs(abs(ex[1]) - j) < 1e-12
        # the classical image is a pole (0, +-1, 0)
        assert abs(abs(point_from_angles(math.pi / 2, -math.pi / 2)[1]) - 1) < 1e-15

    @pytest.mark.parametrize("j", [0.5, 1.5, 7, 25.5, 100.5])
    def test_bloch_vector_matches_angle_convention(self, j):
        rng = np.random.default_rng(int(2 * j))
        ops = build_spin_operators(j)
        for _ in range(5):
            th = rng.uniform(0.05, math.pi - 0.05)
            ph = rng.uniform(-math.pi, math.pi)
            psi = coherent_state(j, th, ph)
            b = np.array([np.vdot(psi, op @ psi).real
                          for op in (ops.jx, ops.jy, ops.jz)]) / j
            assert np.abs(b - point_from_angles(th, ph)).max() <= 1e-12
            assert abs(np.linalg.norm(psi) - 1) <= 1e-12

    def test_angle_round_trip(self):
        rng = np.random.default_rng(3)
        th = rng.uniform(0.01, math.pi - 0.01, 20)
        ph = rng.uniform(-math.pi + 0.01, math.pi, 20)
        t2, p2 = angles_from_point(point_from_angles(th, ph))
        assert np.abs(t2 - th).max() < 1e-12
        assert np.abs(p2 - ph).max() < 1e-12

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            coherent_state(1, -0.2, 0.0)
        with pytest.raises(ValueError):
            coherent_state(1, math.pi + 0.2, 0.0)


class TestCollectiveFloquet:
    @pytest.mark.parametrize("j,k,kp", [(2, 1.0, 0.5), (10.5, 3.0, -2.0),
                                        (100, 6.0, 6.0), (500.5, 2.5, 0.7)])
    def test_unitarity(self, j, k, kp):
        ops = build_spin_operators(j)
        u = build_collective_floquet(ops, transform_params(k, kp)).matrix
        res = np.abs(u.conj().T @ u - np.eye(ops.dim)).max()
        assert res <= 1e-11

    def test_zero_kick_is_pure_rotation(self):
        # k = k' = 0: one period turns the Bloch vector (1,0,0) -> (0,0,-1)
        j = 3.0
        ops = build_spin_operators(j)
        u = build_collective_floquet(ops, transform_params(0.0, 0.0))
        psi = u.matrix @ coherent_state(j, math.pi / 2, 0.0)
        b = np.array([np.vdot(psi, op @ psi).real
                      for op in (ops.jx, ops.jy, ops.jz)]) / j
        assert np.abs(b - np.array([0.0, 0.0, -1.0])).max() < 1e-12

    @pytest.mark.parametrize("j", [1, 2.5, 10])
    def test_parity_commutation(self, j):
        ops = build_spin_operators(j)
        u = build_collective_floquet(ops, transform_params(2.3, 0.9)).matrix
        ry_pi = ops.rotation_y(math.pi)
        assert np.abs(u @ ry_pi - ry_pi @ u).max() <= 1e-10


class TestQubitFloquet:
    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_collective_up_to_global_phase(self, n):
        rng = np.random.default_rng(n)
        iso = dicke_isometry(n)
        ops = build_spin_operators(n / 2)
        for _ in range(5):
            params = transform_params(*rng.uniform(-3, 3, 2))
            uq = iso.conj().T @ build_qubit_floquet(n, params) @ iso
            uc = build_collective_floquet(ops, params).matrix
            phase = np.exp(-0.5j * params.k_r)
            assert np.abs(uc - phase * uq).max() <= 1e-11

    def test_zero_kick_is_product_rotation(self):
        n = 4
        params = transform_params(0.0, 0.0)
        u = build_qubit_floquet(n, params)
        r = np.array([[np.cos(math.pi / 4), -np.sin(math.pi / 4)],
                      [np.sin(math.pi / 4), np.cos(math.pi / 4)]], dtype=complex)
        ref = r
        for _ in range(n - 1):
            ref = np.kron(ref, r)
        assert np.abs(u - ref).max() <= 1e-13

    def test_two_qubit_spectrum(self):
        rng = np.random.default_rng(7)
        iso = dicke_isometry(2)
        for _ in range(10):
            params = params_from_radial(*rng.uniform(-3, 3, 2))
            u = iso.conj().T @ build_qubit_floquet(2, params) @ iso
            ev = list(np.linalg.eigvals(u))
            for target in (-1j, 1j, np.exp(-0.5j * params.k_r)):
                i = int(np.argmin(np.abs(np.array(ev) - target)))
                assert abs(ev[i] - target) <= 1e-12
                ev.pop(i)

    def test_size_limits(self):
        with pytest.raises(DimensionLimitError):
            build_qubit_floquet(13, transform_params(1, 1))
        with pytest.raises(ValueError):
            build_qubit_floquet(1, transform_params(1, 1))
