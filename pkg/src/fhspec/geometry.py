"""Planar helpers for closed complex polylines."""

import numpy as np
from scipy.spatial import ConvexHull

from fhspec.errors import OnCurveError


def distance_to_polyline(points, z):
    """Minimum distance from ``z`` to the closed polyline through ``points``."""
    a = np.asarray(points, dtype=complex)
    b = np.roll(a, -1)
    seg = b - a
    denom = np.abs(seg) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, ((z - a) * np.conj(seg)).real / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return float(np.min(np.abs(a + t * seg - z)))


def polyline_winding(points, z, tol=0.0):
    """Winding number of the closed polyline ``points`` about ``z``.

    Sums principal-branch argument increments of consecutive vertices, which
    is exact as long as ``z`` does not lie within ``tol`` of any segment.
    """
    pts = np.asarray(points, dtype=complex)
    if tol > 0 and distance_to_polyline(pts, z) <= tol:
        raise OnCurveError(f"point {z} lies within {tol:g} of the curve")
    rel = pts - z
    if np.any(rel == 0):
        raise OnCurveError(f"point {z} is a vertex of the curve")
    steps = np.angle(np.roll(rel, -1) / rel)
    return int(np.rint(steps.sum() / (2 * np.pi)))


def hull_centroid(points):
    """Mean of the convex-hull vertices of a complex point cloud."""
    pts = np.asarray(points, dtype=complex)
    xy = np.column_stack([pts.real, pts.imag])
    try:
        hull = ConvexHull(xy)
    except Exception:  # degenerate (collinear / coincident) input
        return complex(pts.mean())
    v = xy[hull.vertices]
    return complex(v[:, 0].mean(), v[:, 1].mean())
