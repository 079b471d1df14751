"""Closed-form 2-, 3- and 4-qubit dynamics in the parity basis.

The Floquet operator block-diagonalizes over parity eigenstates; the
blocks have closed-form n-th powers, so the state at kick n is a direct
trig evaluation (no matrix powers).  These series are the oracle layer for
the numeric spin engine, and in turn every formula here is pinned against
dense 2^N evolution in the test suite.

Basis (coefficients ordered as listed):

  N=2: (|00>-|11>)/sqrt2, (|01>+|10>)/sqrt2, (|00>+|11>)/sqrt2
  N=3: (|000>-i|111>)/sqrt2, (|W>+i|Wb>)/sqrt2,
       (|000>+i|111>)/sqrt2, (|W>-i|Wb>)/sqrt2
  N=4: (|0000>+|1111>)/sqrt2, (|W>-|Wb>)/sqrt2, sym|0011>,
       (|0000>-|1111>)/sqrt2, (|W>+|Wb>)/sqrt2

where |W> (|Wb>) is the normalized symmetric one-excitation
(one-de-excitation) state.  The rotation angle gamma of the inner 2x2
blocks satisfies cos(gamma) = sin(2 k_r/3)/2 for N=3 and
cos(gamma) = sin(k_r)/2 for N=4; |cos gamma| <= 1/2 means
sin(gamma) >= sqrt(3)/2, so the sin(n gamma)/sin(gamma) amplitudes are
never singular for real kicks.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .params import KickParams

__all__ = [
    "ClosedFormRequest",
    "RationalAngle",
    "closed_form_coefficients",
    "closed_form_rho1",
    "closed_form_linear_entropy",
    "closed_form_time_average",
    "TimeAverageResult",
    "average_formula_2q_general",
    "average_formula_3q_polar",
    "average_formula_3q_equatorial",
    "average_formula_4q_polar",
    "average_formula_4q_equatorial",
    "periodicity_predicate",
    "PeriodicityVerdict",
    "detect_period",
]

_SQ2 = math.sqrt(2.0)
_SQ3 = math.sqrt(3.0)
_SQ6 = math.sqrt(6.0)


@dataclass(frozen=True)
class ClosedFormRequest:
    """A closed-form evaluation request for the few-qubit solutions."""

    n_qubits: int
    kick: KickParams
    theta0: float = 0.0
    phi0: float = 0.0
    n: int = 0

    def __post_init__(self):
        if self.n_qubits not in (2, 3, 4):
            raise ValueError("closed forms exist for 2, 3 and 4 qubits")
        if self.n < 0:
            raise ValueError("kick index must be >= 0")


@dataclass(frozen=True)
class RationalAngle:
    """An angle numerator/denominator * pi with gcd(num, den) = 1."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        g = math.gcd(self.numerator, self.denominator)
        if g != 1:
            object.__setattr__(self, "numerator", self.numerator // g)
            object.__setattr__(self, "denominator", self.denominator // g)

    @property
    def value(self) -> float:
        return self.numerator * math.pi / self.denominator


def _initial_coefficients(n_qubits, theta0, phi0):
    c = math.cos(theta0 / 2)
    s = math.sin(theta0 / 2)
    e1 = np.exp(-1j * phi0)
    if n_qubits == 2:
        return np.array([
            (c * c - e1 * e1 * s * s) / _SQ2,
            _SQ2 * c * s * e1,
            (c * c + e1 * e1 * s * s) / _SQ2,
        ])
    if n_qubits == 3:
        w = _SQ3 * c * c * s * e1
        wb = _SQ3 * c * s * s * e1 * e1
        return np.array([
            (c**3 + 1j * e1**3 * s**3) / _SQ2,
            (w - 1j * wb) / _SQ2,
            (c**3 - 1j * e1**3 * s**3) / _SQ2,
            (w + 1j * wb) / _SQ2,
        ])
    w = 2 * c**3 * s * e1
    wb = 2 * c * s**3 * e1**3
    return np.array([
        (c**4 + e1**4 * s**4) / _SQ2,
        (w - wb) / _SQ2,
        _SQ6 * c * c * s * s * e1 * e1,
        (c**4 - e1**4 * s**4) / _SQ2,
        (w + wb) / _SQ2,
    ])


def _gamma(n_qubits, k_r):
    scale = 2.0 / 3.0 if n_qubits == 3 else 1.0
    return math.acos(math.sin(scale * k_r) / 2.0)


def _alpha_beta(n, gamma, k_r, k_theta, scale):
    """Inner-block amplitudes alpha_n, beta_n for kick indices n.

    alpha_n = cos(n g) + (i/4)(sin n g / sin g)(3 cos(s kt) - cos(s kr)),
    beta_n = (sqrt3/4)(sin n g / sin g)(cos(s kr) + cos(s kt)
             + 2 i sin(s kt)).  sin(gamma) >= sqrt(3)/2 always (see module
    docstring), so no limit evaluation is ever required; the guard below
    exists for exotic/complex parameter experiments only.
    """
    sg = math.sin(gamma)
    n = np.asarray(n)
    if sg > 1e-14:
        ratio = np.sin(n * gamma) / sg
    else:  # pragma: no cover - unreachable for real kick strengths
        ratio = n * np.cos(n * gamma) / math.cos(gamma)
    a = np.cos(n * gamma) + 0.25j * ratio * (
        3 * math.cos(scale * k_theta) - math.cos(scale * k_r))
    b = (_SQ3 / 4) * ratio * (
        math.cos(scale * k_r) + math.cos(scale * k_theta)
        + 2j * math.sin(scale * k_theta))
    return a, b


def closed_form_coefficients(req: ClosedFormRequest, n=None):
    """Parity-basis coefficients of the state at kick n (vectorized in n).

    Returns an (len(n), n_basis) complex array; n defaults to req.n.
    """
    if n is None:
        n = req.n
    n = np.atleast_1d(np.asarray(n))
    kr, kt = req.kick.k_r, req.kick.k_theta
    d = _initial_coefficients(req.n_qubits, req.theta0, req.phi0)
    cos_h = np.cos(n * np.pi / 2)
    sin_h = np.sin(n * np.pi / 2)
    if req.n_qubits == 2:
        out = np.empty((n.size, 3), dtype=complex)
        out[:, 0] = cos_h * d[0] - sin_h * np.exp(-0.5j * kt) * d[1]
        out[:, 1] = sin_h * np.exp(0.5j * kt) * d[0] + cos_h * d[1]
        out[:, 2] = np.exp(-0.5j * n * kr) * d[2]
        return out
    if req.n_qubits == 3:
        g = _gamma(3, kr)
        a, b = _alpha_beta(n, g, kr, kt, 2.0 / 3.0)
        ph = np.exp(-1j * n * kr / 3)
        php = ph * np.exp(-1j * n * np.pi / 4)
        phm = ph * (-1.0) ** n * np.exp(1j * n * np.pi / 4)
        out = np.empty((n.size, 4), dtype=complex)
        out[:, 0] = php * (a * d[0] - b.conj() * d[1])
        out[:, 1] = php * (b * d[0] + a.conj() * d[1])
        out[:, 2] = phm * (a * d[2] + b.conj() * d[3])
        out[:, 3] = phm * (-b * d[2] + a.conj() * d[3])
        return out
    g = _gamma(4, kr)
    a, b = _alpha_beta(n, g, kr, kt, 1.0)
    php = np.exp(-0.5j * n * (kr + np.pi))
    phm = np.exp(-0.75j * n * kr)
    out = np.empty((n.size, 5), dtype=complex)
    out[:, 0] = php * (a * d[0] + 1j * b.conj() * d[2])
    out[:, 1] = (-1.0) ** n * d[1]
    out[:, 2] = php * (1j * b * d[0] + a.conj() * d[2])
    out[:, 3] = phm * (cos_h * d[3] - sin_h * np.exp(-0.75j * kt) * d[4])
    out[:, 4] = phm * (sin_h * np.exp(0.75j * kt) * d[3] + cos_h * d[4])
    return out


def _rho1_entries(n_qubits, cc):
    """(diagonal deviation p1, off-diagonal p12) of rho_1 from coefficients."""
    if n_qubits == 2:
        c0, c1, c2 = cc[..., 0], cc[..., 1], cc[..., 2]
        p1 = (c0 * c2.conj()).real
        p12 = (c1 * c2.conj()).real + 1j * (c0 * c1.conj()).imag
        return p1, p12
    if n_qubits == 3:
        c0, c1, c2, c3 = (cc[..., i] for i in range(4))
        p1 = (c0 * c2.conj()).real + (c1 * c3.conj()).real / 3.0
        p12 = ((-1j / 3.0) * (c1 + c3) * (c1 - c3).conj()
               + (_SQ3 / 6.0) * (c0 + c2) * (c1 + c3).conj()
               - (1.0 / (2.0 * _SQ3)) * (c1 - c3) * (c0 - c2).conj())
        return p1, p12
    c0, c1, c2, c3, c4 = (cc[..., i] for i in range(5))
    # the c1 c4* weight is 1/2: rho1[0,0] - 1/2 = <Jz>/4 and
    # <Jz> = 4 Re[c0 c3*] + 2 Re[c1 c4*] in this basis
    p1 = (c0 * c3.conj()).real + 0.5 * (c1 * c4.conj()).real
    p12 = (0.25 * (c1 - c4) * (c3 - c0).conj()
           + 0.25 * (c0 + c3) * (c1 + c4).conj()
           + (_SQ3 / 4.0) * c2 * (c4 - c1).conj()
           + (_SQ3 / 4.0) * c2.conj() * (c4 + c1))
    return p1, p12


def closed_form_rho1(req: ClosedFormRequest):
    """Single-qubit reduced density matrix at kick req.n."""
    cc = closed_form_coefficients(req)
    p1, p12 = _rho1_entries(req.n_qubits, cc)
    p1, p12 = complex(p1[0]).real, complex(p12[0])
    return np.array([[0.5 + p1, p12], [np.conj(p12), 0.5 - p1]])


def closed_form_linear_entropy(req: ClosedFormRequest, n=None):
    """Single-qubit linear entropy 1/2 - 2 p1^2 - 2 |p12|^2 at kick(s) n.

    Scalar for scalar n (or req.n), else an array over the given kicks.
    """
    scalar = n is None or np.isscalar(n)
    cc = closed_form_coefficients(req, n)
    p1, p12 = _rho1_entries(req.n_qubits, cc)
    s = 0.5 - 2.0 * p1**2 - 2.0 * np.abs(p12) ** 2
    return float(s[0]) if scalar else s


# ---------------------------------------------------------------------------
# infinite-time averages

_SPECIAL_STATES = {
    "polar": (0.0, 0.0),
    "equatorial": (math.pi / 2, -math.pi / 2),
}


@dataclass(frozen=True)
class TimeAverageResult:
    """Infinite-time-averaged linear entropy with diagnostics.

    value is the exact generic average of the closed-form series (valid
    whenever the kick angles are not rational multiples of pi).  resonant
    flags rational angles, where the true empirical mean can differ from
    the generic value.  variants holds named alternative closed-form
    expressions evaluated at the same kick; consistent records whether they
    all agree with value to 1e-9.
    """

    value: float
    resonant: bool
    variants: dict = field(default_factory=dict)
    consistent: bool = True


def _torus_average(n_qubits, kick, theta0, phi0, n_theta=32, n_phi=16):
    """Exact generic infinite-time average of the linear-entropy series.

    The series is a trig polynomial in the equidistributing phases
    (n gamma, n k_r/4-type) tensored with a small residue class of n, so
    the infinite-time mean equals a residue average of torus integrals;
    equispaced sampling integrates trig polynomials of this degree exactly.
    """
    kr, kt = kick.k_r, kick.k_theta
    d = _initial_coefficients(n_qubits, theta0, phi0)
    if n_qubits == 2:
        # closed form: <S> = 1/2 - |d2|^2 (1 - |d2|^2)
        #   - Im[d0 d1*]^2 - Im[e^{-i kt} d1 d0*]^2
        a2 = abs(d[2]) ** 2
        return (0.5 - a2 * (1 - a2)
                - (d[0] * np.conj(d[1])).imag ** 2
                - (np.exp(-1j * kt) * d[1] * np.conj(d[0])).imag ** 2)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    if n_qubits == 3:
        # th stands for the free angle n*gamma
        g = _gamma(3, kr)
        sg = math.sin(g)
        a = np.cos(th) + 0.25j * (np.sin(th) / sg) * (
            3 * math.cos(2 * kt / 3) - math.cos(2 * kr / 3))
        b = (_SQ3 / 4) * (np.sin(th) / sg) * (
            math.cos(2 * kr / 3) + math.cos(2 * kt / 3)
            + 2j * math.sin(2 * kt / 3))
        vals = []
        for r in range(8):
            php = np.exp(-1j * r * np.pi / 4)
            phm = (-1.0) ** r * np.exp(1j * r * np.pi / 4)
            cc = np.stack([
                php * (a * d[0] - b.conj() * d[1]),
                php * (b * d[0] + a.conj() * d[1]),
                phm * (a * d[2] + b.conj() * d[3]),
                phm * (-b * d[2] + a.conj() * d[3]),
            ], axis=-1)
            p1, p12 = _rho1_entries(3, cc)
            vals.append((0.5 - 2 * p1**2 - 2 * np.abs(p12) ** 2).mean())
        return float(np.mean(vals))
    g = _gamma(4, kr)
    sg = math.sin(g)
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    a = np.cos(TH) + 0.25j * (np.sin(TH) / sg) * (
        3 * math.cos(kt) - math.cos(kr))
    b = (_SQ3 / 4) * (np.sin(TH) / sg) * (
        math.cos(kr) + math.cos(kt) + 2j * math.sin(kt))
    vals = []
    for r in range(4):
        c_h = math.cos(r * math.pi / 2)
        s_h = math.sin(r * math.pi / 2)
        # PH stands for the free angle n k_r/4; the coefficient phases are
        # integer powers of e^{-i PH} times residue factors of n mod 4
        php = np.exp(-1j * r * np.pi / 2) * np.exp(-2j * PH)
        phm = np.exp(-3j * PH)
        cc = np.stack([
            php * (a * d[0] + 1j * b.conj() * d[2]),
            (-1.0) ** r * np.ones_like(a) * d[1],
            php * (1j * b * d[0] + a.conj() * d[2]),
            phm * np.full_like(a, c_h * d[3] - s_h * np.exp(-0.75j * kt) * d[4]),
            phm * np.full_like(a, s_h * np.exp(0.75j * kt) * d[3] + c_h * d[4]),
        ], axis=-1)
        p1, p12 = _rho1_entries(4, cc)
        vals.append((0.5 - 2 * p1**2 - 2 * np.abs(p12) ** 2).mean())
    return float(np.mean(vals))


def average_formula_2q_general(kick: KickParams, theta0, phi0) -> float:
    """A trig-polynomial expression for the 2-qubit average.

    Exact at the polar and equatorial states; disagrees with the
    coefficient dynamics at general states (kept for cross-checks, see
    TimeAverageResult.variants).
    """
    c = np.cos
    th, ph, kt = theta0, phi0, kick.k_theta
    out = (106 + 8 * c(2 * th) + 14 * c(4 * th) - 4 * c(2 * th - 4 * ph)
           + c(4 * th - 4 * ph) + 6 * c(4 * ph) + c(4 * th + 4 * ph)) / 1024
    out += (32 * c(2 * kt) * np.sin(th) ** 2
            * (c(2 * ph) * (3 + c(2 * th)) - 2 * np.sin(th) ** 2)
            - 4 * c(2 * th + 4 * ph)) / 1024
    out += (3 + c(2 * th) + 2 * c(2 * ph) * np.sin(th) ** 2) ** 2 / 128
    out += np.sin(2 * kt) * np.sin(th) * np.sin(2 * th) * np.sin(2 * ph) / 16
    return float(out)


def average_formula_3q_polar(kick: KickParams) -> float:
    """Rational-trig expression for the 3-qubit polar-state average.

    Disagrees with the coefficient dynamics (by up to ~1.5e-2); kept for
    cross-checks only.
    """
    c = np.cos
    kr, kt = kick.k_r, kick.k_theta
    den = 64 * (7 + c(4 * kr / 3)) ** 2
    num = (1026 + 13 * c(8 * kr / 3)
           + (304 - 52 * c(4 * kt / 3)) * c(4 * kr / 3) - 112 * c(4 * kt / 3)
           + 8 * c(2 * kr / 3) * c(2 * kt / 3)
           * (-2 + 9 * c(4 * kt / 3) + c(4 * kr / 3)) - 27 * c(8 * kt / 3))
    return float(num / den)


def average_formula_3q_equatorial(kick: KickParams) -> float:
    """Rational-trig expression for the 3-qubit equatorial-state average.

    Disagrees with the coefficient dynamics (off-slice by up to ~0.22);
    kept for cross-checks only.
    """
    c = np.cos
    kr, kt = kick.k_r, kick.k_theta
    den = 32 * (7 + c(4 * kr / 3)) ** 2
    num = (410 + 5 * c(8 * kr / 3)
           + 4 * (28 - 9 * c(4 * kt / 3)) * c(4 * kr / 3) - 144 * c(4 * kt / 3)
           + 8 * c(2 * kr / 3) * c(2 * kt / 3)
           * (10 + 9 * c(4 * kt / 3) + c(4 * kr / 3)) - 27 * c(8 * kt / 3))
    return float(num / den)


def average_formula_4q_polar(kick: KickParams) -> float:
    """[160 + 25 cos(2 k_r) - 9 cos(2 k_theta)] / [64 (7 + cos(2 k_r))]."""
    kr, kt = kick.k_r, kick.k_theta
    return float((160 + 25 * math.cos(2 * kr) - 9 * math.cos(2 * kt))
                 / (64 * (7 + math.cos(2 * kr))))


def average_formula_4q_equatorial(kick: KickParams) -> float:
    """3/8 - [cos(k_r) + 3 cos(k_theta)]^2 / [16 (7 + cos(2 k_r))]."""
    kr, kt = kick.k_r, kick.k_theta
    return float(3.0 / 8.0 - (math.cos(kr) + 3 * math.cos(kt)) ** 2
                 / (16 * (7 + math.cos(2 * kr))))


def _rational_multiple_of_pi(x, tol=1e-12, max_den=1000):
    """Fraction p/q with |x/pi - p/q| <= tol and q <= max_den, else None."""
    f = Fraction(x / math.pi).limit_denominator(max_den)
    if abs(x / math.pi - float(f)) <= tol:
        return f
    return None


def _is_resonant(n_qubits, kick, tol=1e-12):
    """Rational-angle resonance where the generic average may not hold."""
    kr = kick.k_r
    if n_qubits == 2:
        return _rational_multiple_of_pi(kr, tol) is not None
    g = _gamma(n_qubits, kr)
    if _rational_multiple_of_pi(g, tol) is not None:
        return True
    if n_qubits == 4:
        return _rational_multiple_of_pi(kr / 4, tol) is not None
    return False


def closed_form_time_average(n_qubits: int, case, kick: KickParams,
                             theta0: float = None, phi0: float = None) -> TimeAverageResult:
    """Infinite-time-averaged linear entropy for 2-4 qubits.

    case is "polar" (theta0 = phi0 = 0), "equatorial" (pi/2, -pi/2) or
    "general" with explicit (theta0, phi0).  The primary value is the exact
    generic average of the coefficient dynamics; named alternative
    closed-form expressions are evaluated into variants, and consistent is
    False when any of them disagrees beyond 1e-9 (several of the compact
    expressions are only exact on special parameter slices).  A resonant
    flag marks rational-angle kicks where any generic average can differ
    from the empirical mean.
    """
    if case == "general":
        if theta0 is None or phi0 is None:
            raise ValueError("case 'general' needs theta0 and phi0")
    elif case in _SPECIAL_STATES:
        theta0, phi0 = _SPECIAL_STATES[case]
    else:
        raise ValueError(f"unknown case {case!r}")
    if n_qubits not in (2, 3, 4):
        raise ValueError("closed forms exist for 2, 3 and 4 qubits")

    value = float(_torus_average(n_qubits, kick, theta0, phi0))
    variants = {}
    if n_qubits == 2:
        variants["trig_polynomial_general"] = average_formula_2q_general(
            kick, theta0, phi0)
        if case == "polar":
            variants["constant_quarter"] = 0.25
        if case == "equatorial":
            variants["sin2_ktheta_over_4"] = float(
                math.sin(kick.k_theta) ** 2 / 4)
            variants["sin2_half_ktheta_over_4"] = float(
                math.sin(kick.k_theta / 2) ** 2 / 4)
    elif n_qubits == 3:
        if case == "polar":
            variants["rational_trig"] = average_formula_3q_polar(kick)
        if case == "equatorial":
            variants["rational_trig"] = average_formula_3q_equatorial(kick)
    else:
        if case == "polar":
            variants["rational_trig"] = average_formula_4q_polar(kick)
        if case == "equatorial":
            variants["rational_trig"] = average_formula_4q_equatorial(kick)
    consistent = all(abs(v - value) <= 1e-9 for v in variants.values())
    return TimeAverageResult(
        value=value,
        resonant=_is_resonant(n_qubits, kick),
        variants=variants,
        consistent=consistent,
    )


# ---------------------------------------------------------------------------
# periodicity


@dataclass(frozen=True)
class PeriodicityVerdict:
    periodic: bool
    witness: tuple = None  # (a, b) rational multiples of pi, b only for N=4


def _as_fraction(value, tol):
    """value as a fraction of pi.  RationalAngle inputs are exact."""
    if isinstance(value, RationalAngle):
        return Fraction(value.numerator, value.denominator), True
    f = _rational_multiple_of_pi(float(value), tol=tol)
    return f, False


def periodicity_predicate(n_qubits: int, k_r, tol: float = 1e-9) -> PeriodicityVerdict:
    """Whether the linear-entropy dynamics is periodic at this k_r.

    N=2: periodic iff k_r = a pi with a rational.
    N=3: periodic iff cos(a pi) = sin(2 k_r/3)/2 for rational a in
         [1/3, 2/3] (gamma a rational multiple of pi).
    N=4: additionally k_r/4 = b pi with b rational.

    k_r may be a float (tolerance-based verdict, denominators capped at
    1000: periodicity is undecidable on floats) or a RationalAngle for an
    exact verdict.  The witness reports (a,) or (a, b) as Fractions.
    """
    if n_qubits not in (2, 3, 4):
        raise ValueError("closed forms exist for 2, 3 and 4 qubits")
    if n_qubits == 2:
        f, _ = _as_fraction(k_r, tol)
        return PeriodicityVerdict(periodic=f is not None,
                                  witness=None if f is None else (f,))
    kr_val = k_r.value if isinstance(k_r, RationalAngle) else float(k_r)
    gamma = _gamma(n_qubits, kr_val)
    fa = _rational_multiple_of_pi(gamma, tol=tol)
    if fa is None or not (Fraction(1, 3) <= fa <= Fraction(2, 3)):
        return PeriodicityVerdict(periodic=False)
    if n_qubits == 3:
        return PeriodicityVerdict(periodic=True, witness=(fa,))
    fb, _ = _as_fraction(k_r, tol)
    if fb is None:
        return PeriodicityVerdict(periodic=False)
    return PeriodicityVerdict(periodic=True, witness=(fa, fb / 4))


def detect_period(series, tol: float = 1e-10):
    """Smallest p <= len(series)//3 with |s[i+p] - s[i]| <= tol for all i.

    Returns None when no such period exists.  Constant series have period 1.
    """
    s = np.asarray(series, dtype=float)
    max_p = s.size // 3
    if max_p < 1:
        raise ValueError("series too short: need at least 3x the candidate period")
    for p in range(1, max_p + 1):
        if np.abs(s[p:] - s[:-p]).max() <= tol:
            return p
    return None
