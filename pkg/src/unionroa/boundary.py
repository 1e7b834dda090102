"""Level-set boundary export for plotting."""

from __future__ import annotations

import io

import numpy as np

from .poly import Polynomial


def _grid(box, resolution):
    box = np.asarray(box, dtype=float)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return axes, np.stack([g.ravel() for g in mesh], axis=1), mesh[0].shape


def contour_2d(V: Polynomial, gamma: float, box, resolution: int) -> list[np.ndarray]:
    """Polylines of ``{V = gamma}`` by marching squares on a vertex grid.

    Each polyline is an ``(m, 2)`` array in state coordinates; closed curves
    repeat their first point at the end.  Longest curve first.
    """
    from skimage.measure import find_contours

    if V.nvars != 2:
        raise ValueError("contour_2d needs a 2-D polynomial")
    axes, pts, shape = _grid(box, resolution)
    F = V(pts).reshape(shape)
    lines = []
    for c in find_contours(F, gamma):
        xy = np.column_stack(
            [np.interp(c[:, k], np.arange(resolution), axes[k]) for k in range(2)]
        )
        lines.append(xy)
    lines.sort(key=lambda a: (-len(a), tuple(a[0])))
    return lines


def straddling_cells(V: Polynomial, gamma: float, box, resolution: int) -> np.ndarray:
    """Centers of grid cells whose corner values bracket ``gamma``."""
    axes, pts, shape = _grid(box, resolution)
    F = V(pts).reshape(shape) - gamma
    n = F.ndim
    lo = np.full(tuple(s - 1 for s in shape), np.inf)
    hi = -lo
    for corner in np.ndindex(*(2,) * n):
        sl = tuple(slice(c, c + s - 1) for c, s in zip(corner, shape))
        lo = np.minimum(lo, F[sl])
        hi = np.maximum(hi, F[sl])
    idx = np.argwhere((lo <= 0) & (hi >= 0))
    centers = [
        0.5 * (axes[k][idx[:, k]] + axes[k][idx[:, k] + 1]) for k in range(n)
    ]
    return np.column_stack(centers) if len(idx) else np.zeros((0, n))


def polylines_csv(lines: list, header: dict | None = None) -> str:
    out = io.StringIO()
    for k, v in (header or {}).items():
        out.write(f"# {k}: {v}\n")
    out.write("polyline,x1,x2\n")
    for i, line in enumerate(lines):
        for x, y in line:
            out.write(f"{i},{float(x)!r},{float(y)!r}\n")
    return out.getvalue()


def points_csv(P: np.ndarray, header: dict | None = None) -> str:
    out = io.StringIO()
    for k, v in (header or {}).items():
        out.write(f"# {k}: {v}\n")
    n = P.shape[1]
    out.write(",".join(f"x{k + 1}" for k in range(n)) + "\n")
    for row in P:
        out.write(",".join(repr(float(x)) for x in row) + "\n")
    return out.getvalue()
