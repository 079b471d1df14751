"""Spin operators, SU(2) coherent states and Floquet operators.

Collective spin-j objects live in the Jz (Dicke) basis ordered
m = j, j-1, ..., -j.  The explicit N-qubit Floquet operator and the Dicke
isometry connect the collective picture to the 2^N qubit space; the two
Floquet constructions agree on the symmetric subspace up to the global
phase exp(-i k_r / 2).

One-period Floquet operator (operator ordering is significant):

    U = exp(-i k'/(2j) Jx^2) . exp(-i k/(2j) Jz^2) . exp(-i p Jy)
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .params import KickParams

__all__ = [
    "SpinOperators",
    "build_spin_operators",
    "coherent_state",
    "build_collective_floquet",
    "build_qubit_floquet",
    "dicke_isometry",
    "FloquetMatrix",
    "DimensionLimitError",
]


class DimensionLimitError(RuntimeError):
    """Requested dense construction exceeds the supported size."""

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_spin(j) -> float:
    j = float(j)
    two_j = 2 * j
    if j <= 0 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    return j


@dataclass(frozen=True)
class SpinOperators:
    """Dense angular-momentum matrices for spin j.

    Attributes
    ----------
    j : float
        Spin quantum number (2j a positive integer).
    dim : int
        Hilbert-space dimension 2j + 1.
    jx, jy, jz : ndarray
        (dim, dim) complex Hermitian matrices in the Jz basis.
    m : ndarray
        Diagonal of Jz, i.e. j, j-1, ..., -j.
    """

    j: float
    dim: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    m: np.ndarray
    # eigen-decomposition of Jy, shared by every rotation built from it
    _jy_eigvals: np.ndarray = field(repr=False, default=None)
    _jy_eigvecs: np.ndarray = field(repr=False, default=None)

    def rotation_y(self, angle: float) -> np.ndarray:
        """exp(-i * angle * Jy) from the cached Hermitian eigenbasis."""
        v = self._jy_eigvecs
        return (v * np.exp(-1j * angle * self._jy_eigvals)) @ v.conj().T

    def rotation_z(self, angle: float) -> np.ndarray:
        """exp(-i * angle * Jz); diagonal in this basis."""
        return np.diag(np.exp(-1j * angle * self.m))

    def torsion_z(self, a: float) -> np.ndarray:
        """Diagonal of exp(-i a Jz^2)."""
        return np.exp(-1j * a * self.m**2)


def build_spin_operators(j) -> SpinOperators:
    """Construct Jx, Jy, Jz for spin j from the ladder operators.

    Jz is diagonal with entries m = j..-j; J+ has matrix elements
    sqrt(j(j+1) - m(m+1)) and Jx = (J+ + J-)/2, Jy = (J+ - J-)/2i.
    """
    j = _check_spin(j)
    dim = round(2 * j + 1)
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    # <m+1| J+ |m> along the first superdiagonal in this ordering
    amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((dim, dim), dtype=complex)
    jp[np.arange(dim - 1), np.arange(1, dim)] = amp
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    w, v = np.linalg.eigh(jy)
    for a in (jx, jy, jz, m, w, v):
        a.setflags(write=False)
    return SpinOperators(j=j, dim=dim, jx=jx, jy=jy, jz=jz, m=m,
                         _jy_eigvals=w, _jy_eigvecs=v)


def coherent_state(j, theta0: float, phi0: float) -> np.ndarray:
    """SU(2) coherent state |theta0, phi0> in the Jz basis.

    The amplitude at m is

        sqrt(C(2j, j-m)) cos(theta0/2)^(j+m) (e^{-i phi0} sin(theta0/2))^(j-m),

    which is the 2j-fold tensor power of the qubit state
    cos(theta0/2)|0> + e^{-i phi0} sin(theta0/2)|1> restricted to the
    symmetric subspace.  Computed in log space so large j (binomials beyond
    double range) stay accurate; the result is normalized to 1.
    """
    j = _check_spin(j)
    if not (-1e-12 <= theta0 <= math.pi + 1e-12):
        raise ValueError(f"theta0 must lie in [0, pi], got {theta0}")
    if not (-math.pi - 1e-12 < phi0 <= math.pi + 1e-12):
        raise ValueError(f"phi0 must lie in (-pi, pi], got {phi0}")
    dim = round(2 * j + 1)
    q = np.arange(dim)  # number of lowered spins, q = j - m
    c = math.cos(theta0 / 2)
    s = math.sin(theta0 / 2)
    if c == 0.0:
        amps = np.zeros(dim, dtype=complex)
        amps[-1] = np.exp(-1j * phi0 * (dim - 1))
        return amps
    if s == 0.0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    log_binom = 0.5 * (gammaln(dim) - gammaln(q + 1) - gammaln(dim - q))
    log_mag = log_binom + (dim - 1 - q) * math.log(c) + q * math.log(s)
    amps = np.exp(log_mag - log_mag.max()) * np.exp(-1j * phi0 * q)
    return amps / np.linalg.norm(amps)


@dataclass(frozen=True)
class FloquetMatrix:
    """One-period unitary with the parameters that built it."""

    matrix: np.ndarray
    params: KickParams
    j: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_collective_floquet(ops: SpinOperators, params: KickParams) -> FloquetMatrix:
    """U = exp(-i k'/(2j) Jx^2) exp(-i k/(2j) Jz^2) exp(-i p Jy).

    exp(-i a Jz^2) is diagonal; exp(-i a Jx^2) = R exp(-i a Jz^2) R* with
    R = exp(-i pi/2 Jy) (which maps Jz -> Jx); exp(-i p Jy) comes from the
    Hermitian eigendecomposition of Jy.  No general matrix exponentials.
    """
    j = ops.j
    uy = ops.rotation_y(params.p)
    dz = ops.torsion_z(params.k / (2 * j))
    r = ops.rotation_y(np.pi / 2)
    dx = ops.torsion_z(params.k_prime / (2 * j))
    ux = (r * dx) @ r.conj().T
    u = ux @ (dz[:, None] * uy)
    u.setflags(write=False)
    return FloquetMatrix(matrix=u, params=params, j=j)


def _sigma_sum_diag_zz(n: int) -> np.ndarray:
    """Diagonal of sum_{l'<l} sigma^z_{l'} sigma^z_l in the computational basis."""
    basis = np.arange(2**n)
    ones = np.array([bin(b).count("1") for b in basis])
    s = n - 2 * ones  # sum of individual sigma_z eigenvalues
    return (s**2 - n) / 2.0


def build_qubit_floquet(n_qubits: int, params: KickParams) -> np.ndarray:
    """Explicit 2^N x 2^N Floquet operator for N spin-1/2 particles.

    U = exp(-i k'/(4j) sum_{l'<l} sx sx) exp(-i k/(4j) sum_{l'<l} sz sz)
        exp(-i p/2 sum_l sy),  with j = N/2.

    The zz term is diagonal; the xx term is its conjugation by the
    Hadamard Kronecker power (H sz H = sx); the y rotation is a Kronecker
    power of the single-qubit rotation.
    """
    n_qubits = int(n_qubits)
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    if n_qubits > 12:
        raise DimensionLimitError(
            f"dense 2^{n_qubits} Floquet matrix refused; N <= 12"
        )
    j = n_qubits / 2
    diag = _sigma_sum_diag_zz(n_qubits)
    dz = np.exp(-1j * params.k / (4 * j) * diag)
    dx = np.exp(-1j * params.k_prime / (4 * j) * diag)

    # single-qubit rotation exp(-i p/2 sigma_y) and sz<->sx basis change
    half = params.p / 2
    ry = np.array([[np.cos(half), -np.sin(half)], [np.sin(half), np.cos(half)]],
                  dtype=complex)
    hx = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

    uy = ry
    h = hx
    for _ in range(n_qubits - 1):
        uy = np.kron(uy, ry)
        h = np.kron(h, hx)

    u = dz[:, None] * uy
    u = h @ (dx[:, None] * (h @ u))
    return u


def dicke_isometry(n_qubits: int) -> np.ndarray:
    """(2^N, N+1) isometry whose columns are the symmetric Dicke states.

    Column q is the normalized sum of all computational states with q ones,
    i.e. |j, m = j - q> for j = N/2, matching the coherent-state ordering.
    """
    n_qubits = int(n_qubits)
    dim = 2**n_qubits
    cols = np.zeros((dim, n_qubits + 1))
    ones = np.array([bin(b).count("1") for b in range(dim)])
    for q in range(n_qubits + 1):
        sel = ones == q
        cols[sel, q] = 1.0 / np.sqrt(sel.sum())
    return cols.astype(complex)
