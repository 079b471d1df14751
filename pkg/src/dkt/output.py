"""Result persistence: CSV fields, JSON manifests, advisory PNG heatmaps.

CSV is the canonical artifact: one header row (axis names then value
columns), one row per cell in row-major order, every float written with
repr (shortest round-trip decimal), so identical runs produce
byte-identical files.  The PNG heatmap is advisory only (8-bit, min-max
scaled) and needs matplotlib.
"""

import json
import time

import numpy as np

__all__ = ["write_csv", "write_manifest", "write_png", "format_float"]


def format_float(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def write_csv(path, header, rows):
    """Write rows of mixed str/float cells under a header row."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                cells = [c if isinstance(c, str) else format_float(c) for c in row]
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def grid_rows(axes, values):
    """Row-major (axis..., value) rows for a grid field.

    axes is a list of (name, 1-d array); values has the matching shape.
    """
    names = [n for n, _ in axes]
    arrays = [np.asarray(a, dtype=float) for _, a in axes]
    values = np.asarray(values, dtype=float)
    mesh = np.meshgrid(*arrays, indexing="ij")
    flat = [m.ravel() for m in mesh]
    vals = values.ravel()
    if vals.size != flat[0].size:
        raise ValueError("value count does not match the axis grid")
    rows = [tuple(f[i] for f in flat) + (vals[i],) for i in range(vals.size)]
    return names + ["value"], rows


def write_manifest(path, config: dict, config_hash: str, n_workers: int,
                   total_kicks: int, elapsed_s: float, extra: dict = None):
    """JSON sidecar describing a run; config_hash is stable across reruns."""
    from . import __version__

    doc = {
        "config": config,
        "config_hash": config_hash,
        "toolkit_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "workers": n_workers,
        "total_kicks": int(total_kicks),
        "elapsed_seconds": float(elapsed_s),
    }
    if extra:
        doc.update(extra)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write manifest to {path}: {exc}") from exc


def write_png(path, field):
    """8-bit heatmap of a 2-d field, min-max scaled, viridis colormap.

    Advisory output for quick inspection; not bit-stable across matplotlib
    versions.
    """
    try:
        from matplotlib import image as mpimage
    except ImportError as exc:  # pragma: no cover - matplotlib is an extra
        raise RuntimeError(
            "PNG output needs matplotlib (install the 'viz' extra)") from exc
    field = np.asarray(field, dtype=float)
    lo, hi = field.min(), field.max()
    scaled = (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)
    try:
        mpimage.imsave(path, scaled, cmap="viridis", vmin=0.0, vmax=1.0,
                       origin="lower")
    except OSError as exc:
        raise OSError(f"cannot write PNG to {path}: {exc}") from exc
