"""State evolution, reduced density matrices and long-time averages.

Evolution is repeated matrix-vector application of the Floquet unitary.
For permutation-symmetric states the one- and two-qubit reduced density
matrices follow from collective first and second moments:

    rho_1  = (I + sum_a b_a sigma_a) / 2,            b_a = <J_a>/j
    rho_12 = (I4 + sum_a b_a (sigma_a x I + I x sigma_a)
                  + sum_ab T_ab sigma_a x sigma_b) / 4,
    T_ab   = (2 <J_a J_b + J_b J_a> - N delta_ab) / (N (N - 1)),  N = 2j

with the brute-force qubit-space partial trace as the small-N oracle.
"""

import math

import numpy as np

from .params import KickParams, params_from_radial
from .spin import (SpinOperators, FloquetMatrix, build_spin_operators,
                   build_collective_floquet, build_qubit_floquet,
                   coherent_state, DimensionLimitError)

__all__ = [
    "evolve",
    "collective_expectations",
    "rdm_one",
    "rdm_two",
    "rdm_bruteforce",
    "long_time_average",
    "fidelity_average",
    "time_reversal_residual",
    "linear_entropy_series_numeric",
    "measure_map",
    "averaged_entropy_vs_kr",
    "PAULI",
]

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def evolve(state, floquet: FloquetMatrix, n: int, keep_sequence: bool = False):
    """|psi_n> = U^n |psi_0| by repeated matrix-vector products.

    With keep_sequence=True returns an (n+1, dim) array of all states
    (initial state included); otherwise just the final state.
    """
    psi = np.asarray(state, dtype=complex)
    u = floquet.matrix
    if psi.shape != (u.shape[0],):
        raise ValueError(f"state dim {psi.shape} does not match U {u.shape}")
    if keep_sequence:
        seq = np.empty((n + 1, psi.size), dtype=complex)
        seq[0] = psi
        for i in range(1, n + 1):
            psi = u @ psi
            seq[i] = psi
        return seq
    for _ in range(n):
        psi = u @ psi
    return psi


def collective_expectations(state, ops: SpinOperators):
    """First moments <J_a> and symmetrized second moments <J_aJ_b + J_bJ_a>.

    Returns (b, t2) where b is the length-3 array <J_a> and t2 the 3x3
    symmetric array of <J_a J_b + J_b J_a>, a, b in (x, y, z).
    """
    psi = np.asarray(state, dtype=complex)
    v = [ops.jx @ psi, ops.jy @ psi, ops.jz @ psi]
    b = np.array([np.vdot(psi, va).real for va in v])
    t2 = np.empty((3, 3))
    for a in range(3):
        for c in range(a, 3):
            # Re<v_a|v_c> = <J_a J_c + J_c J_a>/2 for Hermitian J's
            t2[a, c] = t2[c, a] = 2.0 * np.vdot(v[a], v[c]).real
    return b, t2


def rdm_one(state, ops: SpinOperators):
    """Single-qubit reduced density matrix of a symmetric 2j-qubit state."""
    b, _ = collective_expectations(state, ops)
    b = b / ops.j
    rho = np.eye(2, dtype=complex)
    for a in range(3):
        rho += b[a] * PAULI[a]
    return rho / 2


def rdm_two(state, ops: SpinOperators):
    """Two-qubit reduced density matrix of a symmetric 2j-qubit state."""
    n = 2 * ops.j
    if n < 2:
        raise ValueError("two-qubit RDM needs at least 2 qubits (j >= 1)")
    b, t2 = collective_expectations(state, ops)
    b = b / ops.j
    t = (2.0 * t2 - n * np.eye(3)) / (n * (n - 1))
    rho = np.eye(4, dtype=complex)
    eye = np.eye(2, dtype=complex)
    for a in range(3):
        rho += b[a] * (np.kron(PAULI[a], eye) + np.kron(eye, PAULI[a]))
        for c in range(3):
            rho += t[a, c] * np.kron(PAULI[a], PAULI[c])
    return rho / 4


def _ptrace_keep_first(psi, n_qubits, n_keep):
    """Partial trace keeping the first n_keep qubits of a pure state."""
    t = psi.reshape(2**n_keep, 2 ** (n_qubits - n_keep))
    return t @ t.conj().T


def rdm_bruteforce(n_qubits: int, theta0: float, phi0: float,
                   params: KickParams, n: int):
    """(rho_1, rho_12) from dense 2^N evolution of a product coherent state."""
    if n_qubits > 6:
        raise DimensionLimitError("brute-force partial trace limited to N <= 6")
    u = build_qubit_floquet(n_qubits, params)
    q = np.array([math.cos(theta0 / 2),
                  np.exp(-1j * phi0) * math.sin(theta0 / 2)], dtype=complex)
    psi = q
    for _ in range(n_qubits - 1):
        psi = np.kron(psi, q)
    psi = np.linalg.matrix_power(u, n) @ psi
    rho1 = _ptrace_keep_first(psi, n_qubits, 1)
    rho12 = _ptrace_keep_first(psi, n_qubits, 2)
    return rho1, rho12


def long_time_average(series, n: int = None) -> float:
    """Arithmetic mean of series entries for kicks 1..n (kick 0 excluded)."""
    s = np.asarray(series, dtype=float)
    if s.size == 0:
        raise ValueError("empty series")
    if n is None:
        n = s.size - 1
    if n < 1:
        raise ValueError("need n >= 1")
    return float(s[1:n + 1].mean())


def _bloch_series(state0, floquet: FloquetMatrix, ops: SpinOperators, n_kicks: int):
    psi = np.asarray(state0, dtype=complex)
    u = floquet.matrix
    out = np.empty((n_kicks + 1, 3))
    for i in range(n_kicks + 1):
        out[i] = [np.vdot(psi, ops.jx @ psi).real,
                  np.vdot(psi, ops.jy @ psi).real,
                  np.vdot(psi, ops.jz @ psi).real]
        if i < n_kicks:
            psi = u @ psi
    return out / ops.j


def fidelity_average(state0, floquet: FloquetMatrix, ops: SpinOperators,
                     t_max: int) -> float:
    """<F> = (1/T) sum_{t=0..T-1} F(rho_1(0), rho_1(t)); the t=0 term is 1.

    Uses the qubit closed form of the Uhlmann fidelity on the Bloch vectors
    of the single-qubit RDMs.
    """
    if t_max < 1:
        raise ValueError("need T >= 1")
    b = _bloch_series(state0, floquet, ops, t_max - 1)
    b0 = b[0]
    tr = (1.0 + b @ b0) / 2.0
    det0 = (1.0 - b0 @ b0) / 4.0
    detn = (1.0 - np.einsum("ij,ij->i", b, b)) / 4.0
    f2 = tr + 2.0 * np.sqrt(np.clip(det0 * detn, 0.0, None))
    f = np.sqrt(np.clip(f2, 0.0, 1.0))
    f[0] = 1.0
    return float(f.mean())


def linear_entropy_series_numeric(j, params: KickParams, theta0, phi0,
                                  n_max: int):
    """Single-qubit linear entropy 1 - tr rho_1^2 for kicks 0..n_max."""
    ops = build_spin_operators(j)
    u = build_collective_floquet(ops, params)
    b = _bloch_series(coherent_state(j, theta0, phi0), u, ops, n_max)
    return 0.5 - 0.5 * np.einsum("ij,ij->i", b, b)


# ---------------------------------------------------------------------------
# time reversal


def time_reversal_residual(j, params: KickParams, case: str) -> float:
    """Residual || T U T^-1 - U^dagger ||_max for an antiunitary T = V K.

    case "standard" (requires k' = 0):   V = exp(i p Jy) exp(i pi Jz)
    case "k_equals_kprime" (k = k'):     V = exp(i p Jy) exp(i pi/2 Jy)
                                             exp(i pi Jz)

    K conjugates entrywise in the Jz basis, so T U T^-1 = V U* V^dagger.
    The case/params pairing is enforced; use symmetry_breaking_residual to
    probe arbitrary (k, k') with both candidate operators.
    """
    ops = build_spin_operators(j)
    if case == "standard":
        if abs(params.k_prime) > 1e-12:
            raise ValueError("case 'standard' requires k' = 0")
        v = ops.rotation_y(-params.p) @ ops.rotation_z(-math.pi)
    elif case == "k_equals_kprime":
        if abs(params.k - params.k_prime) > 1e-12:
            raise ValueError("case 'k_equals_kprime' requires k = k'")
        v = (ops.rotation_y(-params.p) @ ops.rotation_y(-math.pi / 2)
             @ ops.rotation_z(-math.pi))
    else:
        raise ValueError(f"unknown case {case!r}")
    u = build_collective_floquet(ops, params).matrix
    lhs = v @ u.conj() @ v.conj().T
    return float(np.abs(lhs - u.conj().T).max())


def symmetry_breaking_residual(j, params: KickParams) -> float:
    """Smaller of the two canonical time-reversal residuals at (k, k').

    Useful when neither k' = 0 nor k = k' holds: both candidate operators
    are applied and the best (smallest) residual is reported.
    """
    ops = build_spin_operators(j)
    u = build_collective_floquet(ops, params).matrix
    res = []
    for v in (
        ops.rotation_y(-params.p) @ ops.rotation_z(-math.pi),
        ops.rotation_y(-params.p) @ ops.rotation_y(-math.pi / 2) @ ops.rotation_z(-math.pi),
    ):
        lhs = v @ u.conj() @ v.conj().T
        res.append(np.abs(lhs - u.conj().T).max())
    return float(min(res))


# ---------------------------------------------------------------------------
# vectorized long-time-averaged measure maps (grid engines)

_K1 = None
_K2 = None


def _pauli_kron_tables():
    global _K1, _K2
    if _K1 is None:
        eye = np.eye(2, dtype=complex)
        _K1 = np.stack([np.kron(s, eye) + np.kron(eye, s) for s in PAULI])
        _K2 = np.stack([np.stack([np.kron(a, b) for b in PAULI]) for a in PAULI])
    return _K1, _K2


def _binary_entropy(p):
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        nz = q > 1e-15
        out = out - np.where(nz, q * np.log2(np.where(nz, q, 1.0)), 0.0)
    return out


def coherent_state_grid(j, thetas, phis):
    """(n_states, dim) matrix of coherent states for paired angle arrays."""
    thetas = np.asarray(thetas, dtype=float).ravel()
    phis = np.asarray(phis, dtype=float).ravel()
    dim = round(2 * float(j) + 1)
    out = np.empty((thetas.size, dim), dtype=complex)
    for i, (th, ph) in enumerate(zip(thetas, phis)):
        out[i] = coherent_state(j, th, ph)
    return out


def _rho12_batch(b, t):
    """Stack of two-qubit RDMs from Bloch vectors b (n,3) and tensors t (n,3,3)."""
    k1, k2 = _pauli_kron_tables()
    rho = np.broadcast_to(np.eye(4, dtype=complex), (b.shape[0], 4, 4)).copy()
    rho += np.einsum("na,aij->nij", b, k1)
    rho += np.einsum("nab,abij->nij", t, k2)
    return rho / 4


def measure_map(j, params: KickParams, thetas, phis, n_kicks: int,
                measure: str = "vn"):
    """Long-time average (kicks 1..n_kicks) of a correlation measure.

    measure: "linear" | "vn" (single-qubit RDM), "concurrence" | "discord"
    (two-qubit RDM).  States evolve in one batched matrix product per kick,
    so the per-cell arithmetic is independent of how cells are grouped.
    Returns a flat array matching the (thetas, phis) pairing.
    """
    if measure not in ("linear", "vn", "concurrence", "discord"):
        raise ValueError(f"unknown measure {measure!r}")
    ops = build_spin_operators(j)
    u = build_collective_floquet(ops, params).matrix
    psis = coherent_state_grid(j, thetas, phis)
    ns = psis.shape[0]
    two_qubit = measure in ("concurrence", "discord")
    n_spins = 2 * ops.j
    if two_qubit and n_spins < 2:
        raise ValueError("two-qubit measures need j >= 1")
    acc = np.zeros(ns)
    ut = u.T.copy()
    jops_t = [ops.jx.T.copy(), ops.jy.T.copy(), ops.jz.T.copy()]
    for _ in range(n_kicks):
        psis = psis @ ut
        v = [psis @ jt for jt in jops_t]
        b = np.stack([np.einsum("nd,nd->n", psis.conj(), va).real for va in v],
                     axis=1) / ops.j
        if measure in ("vn", "linear"):
            r2 = np.einsum("na,na->n", b, b)
            if measure == "linear":
                acc += 0.5 - 0.5 * r2
            else:
                r = np.sqrt(np.minimum(r2, 1.0))
                acc += _binary_entropy((1.0 + r) / 2.0)
        else:
            t2 = np.empty((ns, 3, 3))
            for a in range(3):
                for c in range(a, 3):
                    m = 2.0 * np.einsum("nd,nd->n", v[a].conj(), v[c]).real
                    t2[:, a, c] = t2[:, c, a] = m
            t = (2.0 * t2 - n_spins * np.eye(3)) / (n_spins * (n_spins - 1))
            rhos = _rho12_batch(b, t)
            if measure == "concurrence":
                from .correlations import concurrence_batch
                acc += concurrence_batch(rhos)
            else:
                from .correlations import quantum_discord
                acc += np.array([quantum_discord(r).discord for r in rhos])
    return acc / n_kicks


def averaged_entropy_vs_kr(j, kr_values, k_theta, theta0, phi0, n_kicks: int):
    """Kick-averaged vN entropy of rho_1 as a function of k_r.

    The workhorse of the metastability scan: one value per k_r, each the
    mean over kicks 1..n_kicks for the coherent state (theta0, phi0).
    """
    ops = build_spin_operators(j)
    psi0 = coherent_state(j, theta0, phi0)
    out = np.empty(len(kr_values))
    for i, kr in enumerate(kr_values):
        u = build_collective_floquet(ops, params_from_radial(kr, k_theta))
        b = _bloch_series(psi0, u, ops, n_kicks)[1:]
        r = np.sqrt(np.minimum(np.einsum("ij,ij->i", b, b), 1.0))
        out[i] = _binary_entropy((1.0 + r) / 2.0).mean()
    return out
