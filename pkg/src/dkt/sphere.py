"""Angle conventions and grids on the unit sphere.

The toolkit-wide convention is

    point(theta, phi) = (sin(theta) cos(phi), -sin(theta) sin(phi), cos(theta)),

with the azimuth measured so that the spin coherent state |theta, phi> has
Bloch vector exactly ``point(theta, phi)``.  All classical/quantum grid
sweeps and the angle readout use this one pair of functions.
"""

import numpy as np

__all__ = [
    "point_from_angles",
    "angles_from_point",
    "angle_grid",
    "area_uniform_grid",
]


def point_from_angles(theta, phi):
    """Unit vector(s) (X, Y, Z) for polar angle(s) theta, azimuth(s) phi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack(
        [st * np.cos(phi), -st * np.sin(phi), np.cos(theta)], axis=-1
    )


def angles_from_point(point):
    """Inverse of :func:`point_from_angles`; phi in (-pi, pi]."""
    point = np.asarray(point, dtype=float)
    z = np.clip(point[..., 2], -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.arctan2(-point[..., 1], point[..., 0])
    return theta, phi


def angle_grid(n_theta, n_phi=None):
    """Cell-center grid: theta uniform in [0, pi], phi uniform in (-pi, pi].

    Returns (thetas, phis) as flat arrays of length n_theta * n_phi in
    row-major (theta-outer) order.
    """
    if n_phi is None:
        n_phi = n_theta
    th = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    ph = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi - np.pi
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    return TH.ravel(), PH.ravel()


def area_uniform_grid(n_u, n_phi=None):
    """Cell-center grid uniform in cos(theta) x phi (equal-area cells).

    Returns an (n_u * n_phi, 3) array of unit vectors in row-major
    (cos-theta-outer) order; the mean of a function over these points is the
    uniform-sphere average under the sin(theta) measure.
    """
    if n_phi is None:
        n_phi = n_u
    u = (np.arange(n_u) + 0.5) * 2.0 / n_u - 1.0
    ph = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi - np.pi
    U, PH = np.meshgrid(u, ph, indexing="ij")
    st = np.sqrt(1.0 - U**2)
    return np.column_stack(
        [(st * np.cos(PH)).ravel(), (-st * np.sin(PH)).ravel(), U.ravel()]
    )
