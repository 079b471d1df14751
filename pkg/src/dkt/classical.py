"""Classical double-kick map on the unit sphere and its chaos indicators.

One period is the composition of a rotation by p = pi/2 about y, a z-torsion
by angle k * Z and an x-torsion by angle k' * X (each torsion angle taken at
its own stage).  Written out, with A = Z cos(kX) + Y sin(kX) and
B = Y cos(kX) - Z sin(kX):

    X' = A
    Y' = B cos(k'A) + X sin(k'A)
    Z' = -X cos(k'A) + B sin(k'A)

The tangent map is the analytic Jacobian of these equations; the largest
Lyapunov exponent accumulates per-kick log stretches of a tangent vector and
the Kolmogorov-Sinai entropy is the same accumulator in log base 2.
"""

import math
from dataclasses import dataclass

import numpy as np

from .params import KickParams
from .sphere import area_uniform_grid, angles_from_point

__all__ = [
    "map_step",
    "map_trajectory",
    "tangent_matrix",
    "largest_lyapunov",
    "ks_entropy",
    "lyapunov_field",
    "phase_portrait",
    "phase_averaged_chaos",
    "FixedPointRecord",
    "find_fixed_points",
    "classify_fixed_point",
    "period2_orbit",
    "period4_stable",
    "period4_monodromy_trace",
    "period4_criterion_value",
    "reflect_x",
    "reflect_y",
    "symmetry_residuals",
]

_SQRT2PI = math.sqrt(2.0) * math.pi


def _step_arrays(x, y, z, k, kp):
    ckx = np.cos(k * x)
    skx = np.sin(k * x)
    a = z * ckx + y * skx
    b = y * ckx - z * skx
    arg = kp * a
    ca = np.cos(arg)
    sa = np.sin(arg)
    return a, b * ca + x * sa, -x * ca + b * sa


def _step_with_tangent(x, y, z, dx, dy, dz, k, kp):
    """Advance points and push tangent vectors through the Jacobian.

    Shares the trig evaluations between the map and its derivative; this is
    the hot kernel for Lyapunov sweeps.
    """
    ckx = np.cos(k * x)
    skx = np.sin(k * x)
    a = z * ckx + y * skx
    b = y * ckx - z * skx
    arg = kp * a
    ca = np.cos(arg)
    sa = np.sin(arg)
    da_x, da_y, da_z = k * b, skx, ckx
    db_x = -k * a
    # rows of the Jacobian via the chain rule on (a, b, arg)
    gy = (-b * sa + x * ca) * kp
    gz = (x * sa + b * ca) * kp
    ndx = da_x * dx + da_y * dy + da_z * dz
    ndy = ((db_x * ca + gy * da_x + sa) * dx
           + (ckx * ca + gy * da_y) * dy
           + (-skx * ca + gy * da_z) * dz)
    ndz = ((-ca + gz * da_x + db_x * sa) * dx
           + (gz * da_y + ckx * sa) * dy
           + (gz * da_z - skx * sa) * dz)
    return a, b * ca + x * sa, -x * ca + b * sa, ndx, ndy, ndz


def _as_unit_point(point):
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError("phase point must be a 3-vector")
    n = np.linalg.norm(p)
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"phase point must be unit norm, |p| = {n}")
    return p / n


def map_step(point, params: KickParams):
    """Apply one kick period to a unit vector (X, Y, Z)."""
    p = _as_unit_point(point)
    out = np.array(_step_arrays(p[0], p[1], p[2], params.k, params.k_prime))
    n = np.linalg.norm(out)
    if abs(n - 1.0) > 1e-12:
        out /= n
    return out


def map_trajectory(point, params: KickParams, n_kicks: int):
    """(n_kicks+1, 3) trajectory including the initial point."""
    out = np.empty((n_kicks + 1, 3))
    out[0] = _as_unit_point(point)
    x, y, z = out[0]
    for i in range(1, n_kicks + 1):
        x, y, z = _step_arrays(x, y, z, params.k, params.k_prime)
        r = math.sqrt(x * x + y * y + z * z)
        x, y, z = x / r, y / r, z / r
        out[i] = (x, y, z)
    return out


def tangent_matrix(point, params: KickParams):
    """Analytic 3x3 Jacobian of the map at a unit-norm point."""
    p = _as_unit_point(point)
    m = np.empty((3, 3))
    for col in range(3):
        e = np.zeros(3)
        e[col] = 1.0
        out = _step_with_tangent(p[0], p[1], p[2], e[0], e[1], e[2],
                                 params.k, params.k_prime)
        m[:, col] = out[3:]
    return m


def _initial_tangent(points):
    """Project e_x onto the tangent plane at each point; fall back to e_y."""
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    dx = 1.0 - x * x
    dy = -x * y
    dz = -x * z
    nrm = np.sqrt(dx * dx + dy * dy + dz * dz)
    degenerate = nrm < 1e-8
    if np.any(degenerate):
        dx = np.where(degenerate, -y * x, dx)
        dy = np.where(degenerate, 1.0 - y * y, dy)
        dz = np.where(degenerate, -y * z, dz)
        nrm = np.sqrt(dx * dx + dy * dy + dz * dz)
    return dx / nrm, dy / nrm, dz / nrm


def _log_stretch_sum(points, params, n_kicks):
    """Sum over kicks of ln(per-step tangent stretch), per point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = pts[:, 0].copy()
    y = pts[:, 1].copy()
    z = pts[:, 2].copy()
    dx, dy, dz = _initial_tangent(pts)
    k, kp = params.k, params.k_prime
    logsum = np.zeros(len(x))
    for _ in range(n_kicks):
        x, y, z, dx, dy, dz = _step_with_tangent(x, y, z, dx, dy, dz, k, kp)
        nrm = np.sqrt(dx * dx + dy * dy + dz * dz)
        logsum += np.log(nrm)
        dx, dy, dz = dx / nrm, dy / nrm, dz / nrm
        r = np.sqrt(x * x + y * y + z * z)
        x, y, z = x / r, y / r, z / r
    return logsum


def largest_lyapunov(point, params: KickParams, n_kicks: int) -> float:
    """Largest Lyapunov exponent (per kick, natural log).

    Deterministic: the initial tangent vector is e_x projected onto the
    tangent plane at the starting point (e_y if degenerate), renormalized
    after every kick.
    """
    if n_kicks < 100:
        raise ValueError("need n_kicks >= 100 for a meaningful estimate")
    p = _as_unit_point(point)
    return float(_log_stretch_sum(p[None, :], params, n_kicks)[0]) / n_kicks


def ks_entropy(point, params: KickParams, n_kicks: int) -> float:
    """Kolmogorov-Sinai entropy (bits per kick).

    Average of log2 of the per-kick stretch of the renormalized tangent
    vector.  With a single tangent vector this equals the largest Lyapunov
    exponent divided by ln 2; both accumulators are kept so the identity is
    testable rather than assumed.
    """
    if n_kicks < 1000:
        raise ValueError("need n_kicks >= 1000 for a meaningful estimate")
    p = _as_unit_point(point)
    return float(_log_stretch_sum(p[None, :], params, n_kicks)[0]) / (n_kicks * math.log(2))


def lyapunov_field(points, params: KickParams, n_kicks: int, log_base=math.e):
    """Lyapunov exponents for an (n, 3) array of starting points.

    log_base=2 yields the Kolmogorov-Sinai entropy per point.
    """
    s = _log_stretch_sum(points, params, n_kicks) / n_kicks
    if log_base != math.e:
        s = s / math.log(log_base)
    return s


def phase_portrait(params: KickParams, initial_points, n_kicks: int):
    """(theta, phi) images of each initial condition under repeated kicks.

    Returns an array of shape (n_points, n_kicks + 1, 2).
    """
    pts = np.atleast_2d(np.asarray(initial_points, dtype=float))
    if pts.size == 0:
        raise ValueError("need at least one initial condition")
    x = pts[:, 0].copy()
    y = pts[:, 1].copy()
    z = pts[:, 2].copy()
    out = np.empty((len(x), n_kicks + 1, 2))
    for i in range(n_kicks + 1):
        th, ph = angles_from_point(np.column_stack([x, y, z]))
        out[:, i, 0] = th
        out[:, i, 1] = ph
        if i < n_kicks:
            x, y, z = _step_arrays(x, y, z, params.k, params.k_prime)
            r = np.sqrt(x * x + y * y + z * z)
            x, y, z = x / r, y / r, z / r
    return out


def phase_averaged_chaos(params: KickParams, grid_n: int, n_kicks: int,
                         indicator: str = "lle") -> float:
    """Mean chaos indicator over an equal-area grid_n x grid_n sphere grid.

    indicator is "lle" (natural log) or "kse" (bits).  The reduction runs in
    fixed row-major grid order, so the result is independent of how the work
    is chunked across workers.
    """
    if grid_n < 50:
        raise ValueError("grid_n >= 50 required for a stable phase average")
    if indicator not in ("lle", "kse"):
        raise ValueError(f"unknown indicator {indicator!r}")
    pts = area_uniform_grid(grid_n)
    base = 2.0 if indicator == "kse" else math.e
    vals = lyapunov_field(pts, params, n_kicks, log_base=base)
    return float(vals.mean())


# ---------------------------------------------------------------------------
# fixed points, periodic orbits, stability


@dataclass(frozen=True)
class FixedPointRecord:
    """A fixed point with its linear-stability data.

    branch is "trivial" for the poles (0, +-1, 0), "nontrivial-upper" for
    X > 0 solutions and "nontrivial-lower" for their Ry(pi) partners.
    multipliers are the tangent-map eigenvalues (one always equals 1);
    stable means the non-unit pair stays on the unit circle (marginal,
    parabolic cases count as unstable).
    """

    point: np.ndarray
    multipliers: np.ndarray = None
    stable: bool = None
    branch: str = "trivial"


def _fixed_point_roots(ka: float, n_brackets: int = 10000):
    """Roots of f(X) = sin^2(ka X)/(1 + sin^2(ka X)) - X^2 on (0, 1]."""

    def f(x):
        s2 = np.sin(ka * x) ** 2
        return s2 / (1 + s2) - x * x

    xs = np.linspace(0.0, 1.0, n_brackets + 1)
    fs = f(xs)
    roots = []
    for i in range(1, n_brackets):
        lo, hi = xs[i], xs[i + 1]
        flo, fhi = fs[i], fs[i + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi >= 0:
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if flo * fm <= 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            if hi - lo < 1e-13:
                break
        roots.append(0.5 * (lo + hi))
    if fs[-1] == 0.0:
        roots.append(1.0)
    return roots


def find_fixed_points(params: KickParams, n_brackets: int = 10000):
    """All fixed points of the map: the two poles plus nontrivial pairs.

    The scan bisects f(X) on X in (0, 1] using the X-equation with the
    larger of |k_r|, |k_theta| (the two quadrant classes swap k_r and
    k_theta); Y and Z follow from the corresponding csc reconstruction.
    Every returned point is verified to satisfy |F(p) - p| <= 1e-9, and
    each X > 0 solution is paired with its Ry(pi) partner.
    """
    records = [
        classify_fixed_point(FixedPointRecord(point=np.array([0.0, 1.0, 0.0])), params),
        classify_fixed_point(FixedPointRecord(point=np.array([0.0, -1.0, 0.0])), params),
    ]
    kr, kt = params.k_r, params.k_theta
    swap = abs(kt) > abs(kr)
    ka, kb = (kt, kr) if swap else (kr, kt)
    for x in _fixed_point_roots(ka, n_brackets):
        s = math.sin(ka * x)
        if abs(s) < 1e-12:
            continue
        y = x * math.cos(kb * x) / s
        z = -x * math.sin(kb * x) / s
        point = np.array([x, y, z])
        nrm = np.linalg.norm(point)
        if abs(nrm - 1.0) > 1e-6:
            continue
        point /= nrm
        if np.linalg.norm(map_step(point, params) - point) > 1e-9:
            continue
        partner = reflect_y(point)
        for p, branch in ((point, "nontrivial-upper"), (partner, "nontrivial-lower")):
            records.append(
                classify_fixed_point(FixedPointRecord(point=p, branch=branch), params)
            )
    return records


def classify_fixed_point(record: FixedPointRecord, params: KickParams) -> FixedPointRecord:
    """Attach tangent-map multipliers and a stability verdict.

    Stability from the eigenvalues (one equals 1 identically): the
    remaining pair has product 1, so it is either an elliptic complex pair
    on the unit circle (stable) or a real pair (lambda, 1/lambda).  Real
    pairs, including marginal ones within 1e-8 of modulus 1, are reported
    unstable.  For nontrivial points the closed-form criterion

        |(k+k') X cot((k+k')X/2) + cos((k+k')X) - 1| < 2

    must agree with the eigenvalue verdict.
    """
    point = _as_unit_point(record.point)
    if np.linalg.norm(map_step(point, params) - point) > 1e-9:
        raise ValueError("not a fixed point of the map at these parameters")
    mults = np.linalg.eigvals(tangent_matrix(point, params))
    order = np.argsort(np.abs(mults - 1.0))
    unit, pair = mults[order[0]], mults[order[1:]]
    if abs(unit - 1.0) > 1e-8:
        raise ValueError("tangent map lacks the unit multiplier; not on the sphere?")
    pair_real = np.max(np.abs(pair.imag)) < 1e-8
    mod = float(np.max(np.abs(pair)))
    stable = (mod <= 1 + 1e-8) and not pair_real
    if record.branch != "trivial" and abs(params.k_theta) <= abs(params.k_r):
        # closed-form criterion for the |k_theta| <= |k_r| quadrant class
        s = params.k + params.k_prime
        x = abs(point[0])
        crit = abs(s * x / math.tan(s * x / 2) + math.cos(s * x) - 1.0)
        if (crit < 2.0) != stable and abs(crit - 2.0) > 1e-6:
            raise AssertionError(
                f"stability criterion ({crit:.6f}) disagrees with multipliers ({mod:.6f})"
            )
    return FixedPointRecord(point=point, multipliers=mults, stable=stable,
                            branch=record.branch)


def period2_orbit(params: KickParams):
    """The bifurcated period-2 pair born when k + k' exceeds sqrt(2) pi.

    Closed form (lowest branch):

        X1 = pi/(k+k') = -Z1,   Y1 = +-sqrt(1 - 2 pi^2/(k+k')^2)

    These points form an exact 2-cycle of the k' = 0 member of the family
    k + k' = const (where k X1 = pi); for other splits of the same k + k'
    the orbit is rotated away from this closed form.  Returns (p1, p2).
    """
    s = params.k + params.k_prime
    if s <= _SQRT2PI:
        raise ValueError(
            f"period-2 orbit exists only for k + k' > sqrt(2) pi = {_SQRT2PI:.6f}"
        )
    x1 = math.pi / s
    y1 = math.sqrt(1.0 - 2.0 * math.pi**2 / s**2)
    p1 = np.array([x1, y1, -x1])
    p2 = np.array([x1, -y1, -x1])
    return p1, p2


_EQUATORIAL_CYCLE = (
    np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]),
    np.array([0.0, 0.0, -1.0]), np.array([-1.0, 0.0, 0.0]),
)


def period4_monodromy_trace(params: KickParams) -> float:
    """In-plane trace of the tangent map around the equatorial 4-cycle.

    The cycle (0,0,1) -> (1,0,0) -> (0,0,-1) -> (-1,0,0) exists for every
    (k, k'); the product of the four tangent matrices has one unit
    eigenvalue, and the remaining 2x2 block has trace tr(M4) - 1 with
    determinant 1, so the cycle is elliptic iff |tr(M4) - 1| < 2.
    """
    m = np.eye(3)
    for p in _EQUATORIAL_CYCLE:
        m = tangent_matrix(p, params) @ m
    return float(np.trace(m).real - 1.0)


def period4_criterion_value(params: KickParams) -> float:
    """|(k+k')^2/2 sin^2((k+k')/2) + 4 (sin(k+k') + cos(k+k'))|.

    A compact expression for the 4-cycle stability threshold ("< 4" would
    mean stable).  It disagrees with the cycle monodromy over part of the
    k+k' range (e.g. it calls k+k' = 4 stable while the monodromy trace is
    16.8), so it is exposed for cross-checking only; period4_stable judges
    the monodromy.
    """
    s = params.k + params.k_prime
    return abs(s * s / 2 * math.sin(s / 2) ** 2 + 4 * (math.sin(s) + math.cos(s)))


def period4_stable(params: KickParams) -> bool:
    """Stability of the equatorial 4-cycle from its monodromy.

    Stable iff |tr - 1| < 2 for the cycle's tangent-map product (elliptic
    multiplier pair); the parabolic boundary, reached as k + k' -> 0,
    counts as unstable.
    """
    t = period4_monodromy_trace(params)
    return bool(abs(t) < 2.0 - 1e-8)


# ---------------------------------------------------------------------------
# symmetries


def reflect_x(point):
    """Rotation by pi about x: (X, Y, Z) -> (X, -Y, -Z)."""
    p = np.asarray(point, dtype=float)
    return p * np.array([1.0, -1.0, -1.0])


def reflect_y(point):
    """Rotation by pi about y: (X, Y, Z) -> (-X, Y, -Z)."""
    p = np.asarray(point, dtype=float)
    return p * np.array([-1.0, 1.0, -1.0])


def symmetry_residuals(params: KickParams, sample_points):
    """Max violation of the three map symmetries over the samples.

    Returns (r1, r2, r3) for Ry F = F Ry, F Rx = Rx F Ry and
    F^2 Rx = Rx F^2 (Euclidean distance between images).
    """
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if pts.size == 0:
        raise ValueError("need at least one sample point")
    r1 = r2 = r3 = 0.0
    for p in pts:
        fp = map_step(p, params)
        ffp = map_step(fp, params)
        f_ry = map_step(reflect_y(p), params)
        r1 = max(r1, np.linalg.norm(reflect_y(fp) - f_ry))
        f_rx = map_step(reflect_x(p), params)
        r2 = max(r2, np.linalg.norm(f_rx - reflect_x(f_ry)))
        ff_rx = map_step(f_rx, params)
        r3 = max(r3, np.linalg.norm(ff_rx - reflect_x(ffp)))
    return r1, r2, r3
