"""Kick-strength parameters of the double kicked top.

One period applies a rotation by ``p`` about y, a torsion of strength ``k``
about z and a torsion of strength ``k_prime`` about x.  The transformed pair

    k_r = (k + k') / 2,    k_theta = (k - k') / 2

separates the dynamics: ``k_r`` drives bifurcations and chaos growth while
``k_theta`` rotates phase-space structures around the trivial fixed points.
"""

import math
from dataclasses import dataclass, field

__all__ = ["KickParams", "transform_params", "params_from_radial"]


@dataclass(frozen=True)
class KickParams:
    """Immutable kick-strength pair with both parameterizations.

    Attributes
    ----------
    k : float
        z-axis torsion strength.
    k_prime : float
        x-axis torsion strength.
    k_r, k_theta : float
        Transformed strengths (k +- k')/2.
    p : float
        Precession angle about y in radians (default pi/2).
    """

    k: float
    k_prime: float
    k_r: float = field(init=False)
    k_theta: float = field(init=False)
    p: float = math.pi / 2

    def __post_init__(self):
        for name in ("k", "k_prime", "p"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        object.__setattr__(self, "k_r", (self.k + self.k_prime) / 2)
        object.__setattr__(self, "k_theta", (self.k - self.k_prime) / 2)


def transform_params(k: float, k_prime: float, p: float = math.pi / 2) -> KickParams:
    """Build :class:`KickParams` from the raw pair (k, k')."""
    return KickParams(k=float(k), k_prime=float(k_prime), p=p)


def params_from_radial(k_r: float, k_theta: float, p: float = math.pi / 2) -> KickParams:
    """Build :class:`KickParams` from the transformed pair (k_r, k_theta).

    The inverse transform k = k_r + k_theta, k' = k_r - k_theta is exact,
    so round-tripping through either constructor reproduces the inputs.
    """
    k_r = float(k_r)
    k_theta = float(k_theta)
    if not (math.isfinite(k_r) and math.isfinite(k_theta)):
        raise ValueError("k_r and k_theta must be finite")
    return KickParams(k=k_r + k_theta, k_prime=k_r - k_theta, p=p)
