"""Scalar correlation measures on one- and two-qubit density matrices.

Entropies are in bits (log base 2); linear entropy is unnormalized
(1 - tr rho^2, maximum 1/2 for a qubit).  Quantum discord maximizes the
classical correlation over rank-1 projective measurements on the first
qubit with a deterministic grid plus coordinate-descent refinement.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "linear_entropy",
    "von_neumann_entropy",
    "concurrence",
    "fidelity_qubit",
    "quantum_discord",
    "DiscordResult",
    "concurrence_batch",
]

_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SYSY = np.kron(_SY, _SY)


def _check_density(rho, dim):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("density matrix trace is not 1")
    return rho


def linear_entropy(rho1) -> float:
    """1 - tr(rho^2) of a single-qubit density matrix; 0 pure, 1/2 mixed."""
    rho1 = _check_density(rho1, 2)
    return float(1.0 - np.trace(rho1 @ rho1).real)


def von_neumann_entropy(rho) -> float:
    """-sum lambda log2 lambda with 0 log 0 = 0; eigenvalues clipped at 0."""
    rho = np.asarray(rho, dtype=complex)
    ev = np.linalg.eigvalsh(rho)
    if ev.min() < -1e-9:
        raise ValueError(f"density matrix has eigenvalue {ev.min()} < -1e-9")
    ev = np.clip(ev, 0.0, 1.0)
    nz = ev > 0
    return float(-(ev[nz] * np.log2(ev[nz])).sum())


def concurrence(rho12) -> float:
    """Two-qubit concurrence from the spin-flipped matrix spectrum.

    C = max(0, sqrt(L1) - sqrt(L2) - sqrt(L3) - sqrt(L4)) where L_i are the
    descending eigenvalues of rho (sy x sy) rho* (sy x sy); conjugation in
    the computational basis.
    """
    rho12 = _check_density(rho12, 4)
    rt = rho12 @ _SYSY @ rho12.conj() @ _SYSY
    ev = np.linalg.eigvals(rt).real
    # abs() guards eigensolver noise on nearly-pure states
    ev = np.sqrt(np.abs(np.sort(ev)))
    return float(max(0.0, ev[3] - ev[2] - ev[1] - ev[0]))


def concurrence_batch(rhos) -> np.ndarray:
    """Concurrence of a stack of (..., 4, 4) density matrices."""
    rhos = np.asarray(rhos, dtype=complex)
    rt = rhos @ _SYSY @ rhos.conj() @ _SYSY
    ev = np.linalg.eigvals(rt).real
    ev = np.sqrt(np.abs(np.sort(ev, axis=-1)))
    return np.maximum(0.0, ev[..., 3] - ev[..., 2] - ev[..., 1] - ev[..., 0])


def fidelity_qubit(rho, sigma) -> float:
    """Uhlmann fidelity of two qubit states, tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Evaluated with the 2x2 closed form F = sqrt(tr(rho sigma) + 2
    sqrt(det rho det sigma)).
    """
    rho = _check_density(rho, 2)
    sigma = _check_density(sigma, 2)
    t = np.trace(rho @ sigma).real
    d = np.linalg.det(rho).real * np.linalg.det(sigma).real
    val = t + 2.0 * np.sqrt(max(d, 0.0))
    return float(np.sqrt(min(max(val, 0.0), 1.0 + 1e-12)))


@dataclass(frozen=True)
class DiscordResult:
    """Quantum discord with its decomposition and optimal measurement."""

    discord: float
    mutual_info: float
    classical_corr: float
    argmax_measurement: tuple


def _vn_batch(rhos):
    ev = np.linalg.eigvalsh(rhos)
    ev = np.clip(ev, 0.0, 1.0)
    nz = ev > 1e-15
    terms = np.where(nz, -ev * np.log2(np.where(nz, ev, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _conditional_entropy(rho4, thetas, phis):
    """sum_i p_i S(rho_B|i) for projectors along (theta, phi) on qubit A."""
    ct = np.cos(thetas / 2)
    st = np.sin(thetas / 2)
    e = np.exp(1j * phis)
    v0 = np.stack([ct, e * st], axis=-1)
    v1 = np.stack([-e.conj() * st, ct], axis=-1)
    out = 0.0
    for v in (v0, v1):
        rb = np.einsum("ma,abcd,mc->mbd", v.conj(), rho4, v)
        p = np.einsum("mbb->m", rb).real
        p = np.clip(p, 1e-15, 1.0)
        out = out + p * _vn_batch(rb / p[:, None, None])
    return out


def quantum_discord(rho12, n_phi: int = 64, n_theta: int = 32,
                    angle_tol: float = 1e-4) -> DiscordResult:
    """Quantum discord D = I - J of a two-qubit state.

    I = S(rho_A) + S(rho_B) - S(rho_AB).  J maximizes S(rho_B) minus the
    measured conditional entropy over rank-1 projective measurements
    {Pi(theta, phi), 1 - Pi} on the first qubit: an n_phi x n_theta grid
    seeds a coordinate-descent refinement down to angle_tol.  Deterministic;
    no randomized restarts.
    """
    rho12 = _check_density(rho12, 4)
    rho4 = rho12.reshape(2, 2, 2, 2)
    rho_a = np.einsum("abcb->ac", rho4)
    rho_b = np.einsum("abad->bd", rho4)
    s_a = von_neumann_entropy(rho_a)
    s_b = von_neumann_entropy(rho_b)
    mutual = s_a + s_b - von_neumann_entropy(rho12)

    th = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    ph = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi - np.pi
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    vals = _conditional_entropy(rho4, TH.ravel(), PH.ravel())
    i = int(np.argmin(vals))
    best = vals[i]
    t0, p0 = TH.ravel()[i], PH.ravel()[i]

    step_t = np.pi / n_theta
    step_p = 2 * np.pi / n_phi
    offs = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    while max(step_t, step_p) > angle_tol:
        TT, PP = np.meshgrid(t0 + offs * step_t, p0 + offs * step_p, indexing="ij")
        vals = _conditional_entropy(rho4, TT.ravel(), PP.ravel())
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = vals[k]
            t0, p0 = TT.ravel()[k], PP.ravel()[k]
        step_t *= 0.5
        step_p *= 0.5

    classical = s_b - float(best)
    return DiscordResult(
        discord=mutual - classical,
        mutual_info=mutual,
        classical_corr=classical,
        argmax_measurement=(float(t0), float(p0)),
    )
