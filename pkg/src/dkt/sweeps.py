"""Sweep jobs: declarative configs, deterministic parallel execution.

A SweepConfig names a job plus its parameter envelope; execute_sweep
dispatches to the classical/quantum engines and returns a GridResult
carrying CSV-ready rows, the optional 2-d field (for heatmaps) and a run
manifest.  Work is cut into fixed-size chunks (independent of the worker
count) and results are reassembled by chunk index, so output bytes do not
depend on how many workers ran.
"""

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .params import KickParams, params_from_radial, transform_params
from . import classical, quantum
from .sphere import angle_grid, point_from_angles
from .spin import DimensionLimitError

__all__ = ["SweepConfig", "GridResult", "execute_sweep", "write_outputs",
           "run_validation", "JOBS", "MEASURES"]

JOBS = (
    "phase-portrait", "lle-map", "kse-scan", "fixed-points",
    "correlation-map", "dynamics", "metastability-scan", "fidelity-scan",
    "validate",
)
MEASURES = ("linear", "vn", "discord", "concurrence")

_CLASSICAL_CHUNK = 4096   # points per unit of work (elementwise kernel)
_QUANTUM_CHUNK = 512      # states per unit of work (fixed => fixed GEMM shapes)


class ConfigError(ValueError):
    """Invalid or inconsistent sweep configuration."""


@dataclass
class SweepConfig:
    """Validated description of one sweep job.

    Exactly one of (k, k_prime) / (k_r, k_theta) fixes the kick pair except
    for scan jobs, which take a range for the swept strength.  Defaults
    follow the common figure envelopes: p = pi/2, kicks = 1000 for
    correlation maps.
    """

    job: str
    k: float = None
    k_prime: float = None
    k_r: float = None
    k_theta: float = None
    kr_range: tuple = None        # (lo, hi, count)
    ktheta_range: tuple = None
    j: float = None
    grid: int = 25
    kicks: int = None
    state: tuple = None           # (theta0, phi0)
    measure: str = "vn"
    out: str = None
    png: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.job not in JOBS:
            raise ConfigError(f"unknown job {self.job!r}; valid: {', '.join(JOBS)}")
        raw = self.k is not None or self.k_prime is not None
        transformed = self.k_r is not None or self.k_theta is not None
        if raw and transformed:
            raise ConfigError("give either (k, k_prime) or (k_r, k_theta), not both")
        if raw and (self.k is None or self.k_prime is None):
            raise ConfigError("both k and k_prime are required together")
        if self.grid < 1:
            raise ConfigError("grid must be >= 1")
        for name in ("kr_range", "ktheta_range"):
            r = getattr(self, name)
            if r is None:
                continue
            lo, hi, count = r
            if not (hi >= lo and int(count) >= 1):
                raise ConfigError(f"{name} must be lo:hi:count with hi >= lo, count >= 1")
            setattr(self, name, (float(lo), float(hi), int(count)))
        if self.measure not in MEASURES:
            raise ConfigError(f"unknown measure {self.measure!r}; valid: {', '.join(MEASURES)}")
        if self.job in ("correlation-map", "dynamics"):
            if self.j is None:
                raise ConfigError(f"{self.job} needs --j")
        elif self.measure != "vn" and self.job not in ("correlation-map", "dynamics"):
            raise ConfigError(f"--measure only applies to correlation-map/dynamics, not {self.job}")
        if self.job in ("metastability-scan", "fidelity-scan") and self.kr_range is None:
            self.kr_range = (1.0, 2.0, 41)
        if self.job == "kse-scan" and self.ktheta_range is None and self.kr_range is None:
            raise ConfigError("kse-scan needs --kr-range or --ktheta-range")
        if self.kicks is None:
            self.kicks = 1000 if self.job in (
                "correlation-map", "dynamics", "metastability-scan",
                "fidelity-scan") else 1500
        if self.kicks < 1:
            raise ConfigError("kicks must be >= 1")
        if self.state is None:
            self.state = (math.pi / 2, -math.pi / 2)
        th, ph = self.state
        if not (0.0 <= th <= math.pi):
            raise ConfigError("state theta must lie in [0, pi]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def kick_params(self) -> KickParams:
        if self.k is not None:
            return transform_params(self.k, self.k_prime)
        kr = self.k_r if self.k_r is not None else 0.0
        kt = self.k_theta if self.k_theta is not None else 0.0
        return params_from_radial(kr, kt)

    def canonical(self) -> dict:
        doc = {k: v for k, v in asdict(self).items() if v is not None}
        doc.pop("workers", None)  # worker count must not change the hash
        doc.pop("out", None)
        doc.pop("png", None)
        return doc

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class GridResult:
    """CSV-ready sweep output plus manifest metadata."""

    header: list
    rows: list
    manifest: dict
    field: np.ndarray = None      # 2-d field for heatmaps, when applicable
    axes: list = None             # [(name, 1-d values)] for grid jobs
    failures: int = 0


def _worker_count(config: SweepConfig) -> int:
    env = os.environ.get("DKT_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"DKT_WORKERS must be an integer, got {env!r}")
    return config.workers


def _chunks(n_items, size):
    return [(i, min(i + size, n_items)) for i in range(0, n_items, size)]


def _run_chunked(fn, payloads, workers):
    """Evaluate fn over payloads, preserving order; fork only if asked."""
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
        return list(pool.map(fn, payloads))


def _lle_chunk(payload):
    pts, params, kicks, base = payload
    return classical.lyapunov_field(pts, params, kicks, log_base=base)


def _measure_chunk(payload):
    j, params, thetas, phis, kicks, measure = payload
    return quantum.measure_map(j, params, thetas, phis, kicks, measure)


def _phase_average_chunk(payload):
    kr, kt, grid_n, kicks, indicator = payload
    return classical.phase_averaged_chaos(
        params_from_radial(kr, kt), grid_n, kicks, indicator)


def execute_sweep(config: SweepConfig) -> GridResult:
    """Run one sweep job and return its result table/field."""
    start = time.time()
    workers = _worker_count(config)
    total_kicks = 0
    axes = None
    fieldv = None
    extra = {}

    try:
        if config.job == "phase-portrait":
            params = config.kick_params()
            th, ph = angle_grid(config.grid)
            pts = point_from_angles(th, ph)
            traj = classical.phase_portrait(params, pts, config.kicks)
            total_kicks = traj.shape[0] * config.kicks
            header = ["trajectory", "kick", "theta", "phi"]
            rows = []
            for t in range(traj.shape[0]):
                for n in range(traj.shape[1]):
                    rows.append((float(t), float(n), traj[t, n, 0], traj[t, n, 1]))

        elif config.job == "lle-map":
            params = config.kick_params()
            th, ph = angle_grid(config.grid)
            pts = point_from_angles(th, ph)
            payloads = [(pts[i0:i1], params, config.kicks, math.e)
                        for i0, i1 in _chunks(len(pts), _CLASSICAL_CHUNK)]
            vals = np.concatenate(_run_chunked(_lle_chunk, payloads, workers))
            total_kicks = len(pts) * config.kicks
            axes = [("theta", np.unique(th)), ("phi", np.unique(ph))]
            fieldv = vals.reshape(config.grid, config.grid)
            header = ["theta", "phi", "value"]
            rows = list(zip(th, ph, vals))

        elif config.job == "kse-scan":
            sweep_kr = config.kr_range is not None
            lo, hi, count = config.kr_range if sweep_kr else config.ktheta_range
            sweep_vals = np.linspace(lo, hi, count)
            fixed = config.kick_params()
            payloads = [
                ((v, fixed.k_theta) if sweep_kr else (fixed.k_r, v))
                + (config.grid, config.kicks, "kse")
                for v in sweep_vals
            ]
            vals = np.array(_run_chunked(_phase_average_chunk, payloads, workers))
            total_kicks = count * config.grid**2 * config.kicks
            name = "k_r" if sweep_kr else "k_theta"
            axes = [(name, sweep_vals)]
            header = [name, "value"]
            rows = list(zip(sweep_vals, vals))

        elif config.job == "fixed-points":
            params = config.kick_params()
            recs = classical.find_fixed_points(params)
            header = ["branch", "X", "Y", "Z", "mult_abs_1", "mult_abs_2",
                      "mult_abs_3", "stable"]
            rows = []
            for r in recs:
                mods = sorted(np.abs(r.multipliers))
                rows.append((r.branch, r.point[0], r.point[1], r.point[2],
                             mods[0], mods[1], mods[2],
                             float(bool(r.stable))))

        elif config.job == "correlation-map":
            params = config.kick_params()
            th, ph = angle_grid(config.grid)
            payloads = [(config.j, params, th[i0:i1], ph[i0:i1], config.kicks,
                         config.measure)
                        for i0, i1 in _chunks(len(th), _QUANTUM_CHUNK)]
            vals = np.concatenate(_run_chunked(_measure_chunk, payloads, workers))
            total_kicks = len(th) * config.kicks
            axes = [("theta", np.unique(th)), ("phi", np.unique(ph))]
            fieldv = vals.reshape(config.grid, config.grid)
            header = ["theta", "phi", "value"]
            rows = list(zip(th, ph, vals))

        elif config.job == "dynamics":
            params = config.kick_params()
            th0, ph0 = config.state
            series = _measure_series(config.j, params, th0, ph0,
                                     config.kicks, config.measure)
            total_kicks = config.kicks
            kicks = np.arange(config.kicks + 1, dtype=float)
            axes = [("kick", kicks)]
            header = ["kick", "value"]
            rows = list(zip(kicks, series))

        elif config.job == "metastability-scan":
            lo, hi, count = config.kr_range
            krs = np.linspace(lo, hi, count)
            th0, ph0 = config.state
            kt = config.k_theta if config.k_theta is not None else 0.0
            j = config.j if config.j is not None else 25.5
            vals = quantum.averaged_entropy_vs_kr(j, krs, kt, th0, ph0,
                                                  config.kicks)
            total_kicks = count * config.kicks
            if count >= 2:
                d = np.diff(vals)
                i = int(np.argmax(d))
                extra["steepest_rise_kr"] = float(0.5 * (krs[i] + krs[i + 1]))
            axes = [("k_r", krs)]
            header = ["k_r", "value"]
            rows = list(zip(krs, vals))

        elif config.job == "fidelity-scan":
            lo, hi, count = config.kr_range
            krs = np.linspace(lo, hi, count)
            th0, ph0 = config.state
            kt = config.k_theta if config.k_theta is not None else 0.0
            j = config.j if config.j is not None else 25.5
            from .spin import build_spin_operators, coherent_state, build_collective_floquet
            ops = build_spin_operators(j)
            psi0 = coherent_state(j, th0, ph0)
            vals = np.array([
                quantum.fidelity_average(
                    psi0, build_collective_floquet(ops, params_from_radial(kr, kt)),
                    ops, config.kicks)
                for kr in krs
            ])
            total_kicks = count * config.kicks
            axes = [("k_r", krs)]
            header = ["k_r", "value"]
            rows = list(zip(krs, vals))

        elif config.job == "validate":
            checks = run_validation()
            header = ["check", "status", "max_error", "tolerance"]
            rows = [(name, "pass" if ok else "FAIL", err, tol)
                    for name, ok, err, tol in checks]
            failures = sum(1 for _, ok, _, _ in checks if not ok)
            manifest = {
                "config": config.canonical(),
                "config_hash": config.config_hash(),
                "workers": workers,
                "total_kicks": 0,
                "elapsed_seconds": time.time() - start,
            }
            return GridResult(header=header, rows=rows, manifest=manifest,
                              failures=failures)

    except (DimensionLimitError, MemoryError) as exc:
        raise DimensionLimitError(str(exc)) from exc

    vals_arr = np.asarray([r[-1] for r in rows], dtype=float) \
        if rows and not isinstance(rows[0][-1], str) else np.array([])
    if vals_arr.size and not np.all(np.isfinite(vals_arr)):
        raise RuntimeError("sweep produced non-finite values")

    manifest = {
        "config": config.canonical(),
        "config_hash": config.config_hash(),
        "workers": workers,
        "total_kicks": int(total_kicks),
        "elapsed_seconds": time.time() - start,
    }
    manifest.update(extra)
    return GridResult(header=header, rows=rows, manifest=manifest,
                      field=fieldv, axes=axes)


def _measure_series(j, params, theta0, phi0, n_kicks, measure):
    """Per-kick series (0..n_kicks) of one measure for one initial state."""
    from .spin import build_spin_operators, coherent_state, build_collective_floquet
    from . import correlations
    ops = build_spin_operators(j)
    u = build_collective_floquet(ops, params)
    psi = coherent_state(j, theta0, phi0)
    out = np.empty(n_kicks + 1)
    for n in range(n_kicks + 1):
        if measure in ("linear", "vn"):
            rho = quantum.rdm_one(psi, ops)
            out[n] = (correlations.linear_entropy(rho) if measure == "linear"
                      else correlations.von_neumann_entropy(rho))
        else:
            rho = quantum.rdm_two(psi, ops)
            out[n] = (correlations.concurrence(rho) if measure == "concurrence"
                      else correlations.quantum_discord(rho).discord)
        if n < n_kicks:
            psi = u.matrix @ psi
    return out


def write_outputs(result: GridResult, out_prefix: str, png: bool = False):
    """Write {out}.csv, {out}.json and optionally {out}.png."""
    from .output import write_csv, write_manifest, write_png
    write_csv(out_prefix + ".csv", result.header, result.rows)
    write_manifest(
        out_prefix + ".json",
        config=result.manifest["config"],
        config_hash=result.manifest["config_hash"],
        n_workers=result.manifest["workers"],
        total_kicks=result.manifest["total_kicks"],
        elapsed_s=result.manifest["elapsed_seconds"],
        extra={k: v for k, v in result.manifest.items()
               if k not in ("config", "config_hash", "workers", "total_kicks",
                            "elapsed_seconds")},
    )
    if png:
        if result.field is None:
            raise ConfigError("job has no 2-d field to render")
        write_png(out_prefix + ".png", result.field)
    return [out_prefix + ".csv", out_prefix + ".json"] + (
        [out_prefix + ".png"] if png else [])


# ---------------------------------------------------------------------------
# validate job: the analytic-vs-numeric oracle suite


def run_validation():
    """Cross-checks between independent routes; returns (name, ok, err, tol)."""
    from .params import params_from_radial
    from .spin import (build_spin_operators, build_collective_floquet,
                       build_qubit_floquet, coherent_state, dicke_isometry)
    from .exact import ClosedFormRequest, closed_form_linear_entropy
    from . import correlations

    rng = np.random.default_rng(20250810)
    checks = []

    # 1. closed-form linear entropy vs numeric collective evolution
    worst = 0.0
    for j in (1.0, 1.5, 2.0):
        for _ in range(4):
            kick = params_from_radial(rng.uniform(0.3, 3.0), rng.uniform(-2, 2))
            th, ph = rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi)
            ns = np.arange(0, 101)
            ref = closed_form_linear_entropy(
                ClosedFormRequest(round(2 * j), kick, th, ph), ns)
            num = quantum.linear_entropy_series_numeric(j, kick, th, ph, 100)
            worst = max(worst, float(np.abs(ref - num).max()))
    checks.append(("closed-form vs numeric linear entropy", worst <= 1e-10,
                   worst, 1e-10))

    # 2. collective-moment RDMs vs brute-force partial traces
    worst = 0.0
    for n_q in (2, 3, 4):
        ops = build_spin_operators(n_q / 2)
        for _ in range(5):
            kick = params_from_radial(rng.uniform(0.3, 3.0), rng.uniform(-2, 2))
            th, ph = rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi)
            n = int(rng.integers(0, 40))
            r1b, r12b = quantum.rdm_bruteforce(n_q, th, ph, kick, n)
            u = build_collective_floquet(ops, kick)
            psi = quantum.evolve(coherent_state(n_q / 2, th, ph), u, n)
            worst = max(worst, float(np.abs(quantum.rdm_one(psi, ops) - r1b).max()))
            if n_q >= 2:
                worst = max(worst, float(np.abs(quantum.rdm_two(psi, ops) - r12b).max()))
    checks.append(("collective RDMs vs brute-force partial trace",
                   worst <= 1e-11, worst, 1e-11))

    # 3. two-qubit Floquet spectrum {-i, i, e^{-i k_r/2}}
    worst = 0.0
    for _ in range(5):
        kick = params_from_radial(rng.uniform(-3, 3), rng.uniform(-3, 3))
        u = build_qubit_floquet(2, kick)
        p = dicke_isometry(2)
        ev = np.linalg.eigvals(p.conj().T @ u @ p)
        target = np.array([-1j, 1j, np.exp(-0.5j * kick.k_r)])
        for t in target:
            i = int(np.argmin(np.abs(ev - t)))
            worst = max(worst, float(abs(ev[i] - t)))
            ev = np.delete(ev, i)
    checks.append(("two-qubit Floquet spectrum", worst <= 1e-12, worst, 1e-12))

    # 4. analytic tangent map vs central finite differences
    worst = 0.0
    for _ in range(50):
        p = rng.normal(size=3)
        p /= np.linalg.norm(p)
        kick = transform_params(rng.uniform(-4, 4), rng.uniform(-4, 4))
        m = classical.tangent_matrix(p, kick)
        h = 1e-6
        fd = np.empty((3, 3))
        for col in range(3):
            e = np.zeros(3)
            e[col] = h
            fd[:, col] = (np.array(classical._step_arrays(*(p + e), kick.k, kick.k_prime))
                          - np.array(classical._step_arrays(*(p - e), kick.k, kick.k_prime))) / (2 * h)
        worst = max(worst, float(np.abs(m - fd).max()))
    checks.append(("tangent map vs finite differences", worst <= 1e-6,
                   worst, 1e-6))

    # 5. map vs rotation-composition oracle
    worst = 0.0
    for _ in range(100):
        p = rng.normal(size=3)
        p /= np.linalg.norm(p)
        kick = transform_params(rng.uniform(-4, 4), rng.uniform(-4, 4))
        worst = max(worst, float(np.abs(
            classical.map_step(p, kick) - _rotation_oracle(p, kick)).max()))
    checks.append(("map vs rotation composition", worst <= 1e-12, worst, 1e-12))

    # 6. Floquet unitarity at large j
    ops = build_spin_operators(50.5)
    u = build_collective_floquet(ops, transform_params(2.0, 0.7)).matrix
    err = float(np.abs(u.conj().T @ u - np.eye(ops.dim)).max())
    checks.append(("Floquet unitarity (j=50.5)", err <= 1e-11, err, 1e-11))

    # 7. concurrence of the p=1/2 Werner state
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    werner = 0.5 * bell + 0.5 * np.eye(4) / 4
    err = abs(correlations.concurrence(werner) - 0.25)
    checks.append(("Werner-state concurrence", err <= 1e-12, err, 1e-12))

    return checks


def _rotation_oracle(p, kick):
    """Independent route: Ry(p), then Rz(k Z), then Rx(k' X), stagewise."""
    def rot(axis, ang):
        c, s = math.cos(ang), math.sin(ang)
        if axis == "y":
            return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
        if axis == "z":
            return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])

    p1 = rot("y", kick.p) @ p
    p2 = rot("z", kick.k * p1[2]) @ p1
    return rot("x", kick.k_prime * p2[0]) @ p2
