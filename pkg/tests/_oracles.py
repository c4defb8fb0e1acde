"""Independent reference implementations used to check the package.

Everything here is deliberately written with different algorithms than the
code under test: Floyd-Warshall instead of Dijkstra, the closed-form
characteristic-cubic solution instead of Jacobi sweeps, winding numbers
instead of ray casting, and dense boundary sampling instead of exact
segment distances.
"""

from __future__ import annotations

import math

import numpy as np


def floyd_warshall(n: int, edges: list[tuple[int, int, float]]) -> np.ndarray:
    """All-pairs shortest distances on an undirected weighted graph."""
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for a, b, w in edges:
        if w < d[a, b]:
            d[a, b] = w
            d[b, a] = w
    for k in range(n):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


def cubic_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Roots of the characteristic polynomial of a symmetric 3x3 matrix,
    via the trigonometric closed form; returned in descending order."""
    a = np.asarray(a, dtype=float)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diag(a))[::-1]
    q = np.trace(a) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, np.linalg.det(b) / 2.0))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.array([e1, 3.0 * q - e1 - e3, e3])


def cubic_eigenvector(a: np.ndarray, lam: float) -> np.ndarray:
    """Unit eigenvector for an eigenvalue of a symmetric 3x3 matrix,
    from the cross product of two rows of (A - lam I)."""
    m = np.asarray(a, dtype=float) - lam * np.eye(3)
    best = None
    best_norm = -1.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(m[i], m[j])
        nv = np.linalg.norm(v)
        if nv > best_norm:
            best, best_norm = v, nv
    return best / np.linalg.norm(best)


def pearson_brute(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation from the raw covariance/sd definition."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    mx, my = x.mean(), y.mean()
    cov = sum((x[i] - mx) * (y[i] - my) for i in range(n)) / (n - 1)
    sx = math.sqrt(sum((v - mx) ** 2 for v in x) / (n - 1))
    sy = math.sqrt(sum((v - my) ** 2 for v in y) / (n - 1))
    return cov / (sx * sy)


def winding_inside(pt, rings) -> bool:
    """Point-in-polygon via the winding number over all rings combined
    (nonzero winding for the exterior minus holes reduces to parity when
    ring orientations are mixed, so holes are handled by counting each
    ring separately and XOR-ing the results)."""
    inside = False
    for ring in rings:
        wn = 0
        for i in range(len(ring) - 1):
            x0, y0 = ring[i]
            x1, y1 = ring[i + 1]
            if y0 <= pt[1]:
                if y1 > pt[1] and _is_left(x0, y0, x1, y1, pt) > 0:
                    wn += 1
            elif y1 <= pt[1] and _is_left(x0, y0, x1, y1, pt) < 0:
                wn -= 1
        if wn != 0:
            inside = not inside
    return inside


def _is_left(x0, y0, x1, y1, pt) -> float:
    return (x1 - x0) * (pt[1] - y0) - (pt[0] - x0) * (y1 - y0)


def sampled_boundary_distance(rings, center, step_m: float = 1.0) -> float:
    """Min distance from center to the polygon boundary, by sampling every
    ring segment at step_m intervals. Overestimates by < step_m/2."""
    cx, cy = center
    best = math.inf
    for ring in rings:
        for i in range(len(ring) - 1):
            x0, y0 = ring[i]
            x1, y1 = ring[i + 1]
            seg_len = math.hypot(x1 - x0, y1 - y0)
            n = max(1, int(math.ceil(seg_len / step_m)))
            ts = np.linspace(0.0, 1.0, n + 1)
            xs = x0 + ts * (x1 - x0)
            ys = y0 + ts * (y1 - y0)
            d = float(np.min(np.hypot(xs - cx, ys - cy)))
            if d < best:
                best = d
    return best


def disk_intersects_sampled(rings, center, radius_m, step_m: float = 1.0) -> bool:
    """Boundary-sampling disk/polygon intersection oracle."""
    if winding_inside(center, rings):
        return True
    return sampled_boundary_distance(rings, center, step_m) <= radius_m
