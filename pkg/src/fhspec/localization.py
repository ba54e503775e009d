"""Localization diagnostics for eigenvectors: entropy, IPR and decay profile."""

from dataclasses import dataclass, asdict
import math
import warnings

import numpy as np

from fhspec.errors import DomainError

EXPONENTIAL_BOUNDARY = "ExponentialBoundary"
ALGEBRAIC_INTERIOR = "AlgebraicInterior"
SUPER_EXPONENTIAL_BOUNDARY = "SuperExponentialBoundary"
UNCLASSIFIED = "Unclassified"


def _weights(vec, tol):
    w = np.abs(np.asarray(vec)) ** 2
    total = w.sum()
    if abs(total - 1.0) > tol:
        raise DomainError(f"vector is not normalised: ||v||^2 = {total:.15g}")
    return w


def shannon_entropy(vec, tol=1e-10):
    """H = -sum |v_j|^2 log2 |v_j|^2 in bits, with 0 log 0 = 0."""
    w = _weights(vec, tol)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def ipr(vec, tol=1e-10):
    """Inverse participation ratio sum |v_j|^4."""
    w = _weights(vec, tol)
    return float(np.sum(w * w))


@dataclass(frozen=True)
class LocalizationProfile:
    entropy: float
    ipr: float
    argmax_index: int
    decay_class: str
    exp_rate: float
    alg_power: float
    exp_r2: float
    alg_r2: float

    def to_dict(self):
        return asdict(self)


def _linfit(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss if ss > 0 else 1.0
    return coef[0], r2


def decay_profile(vec, boundary_fraction=0.1, trim_fraction=0.05, super_margin=0.25,
                  floor=1e-14, min_points=8, tol=1e-10):
    """Fit the tail of |v| beyond its maximum as exponential and as algebraic.

    The tail runs from the argmax toward the farther end of the vector, with
    the last ``trim_fraction`` of indices dropped.  The better fit (R^2 on
    log|v|) and the argmax position (boundary when within n*boundary_fraction
    of either end) select the class.  A boundary profile is super-exponential
    when the exponential rate fitted on the second half of the tail exceeds
    the first half's by ``super_margin`` and exponential beats algebraic.
    """
    v = np.asarray(vec)
    n = len(v)
    if n < 16:
        raise DomainError("decay_profile needs n >= 16")
    H, P = shannon_entropy(v, tol), ipr(v, tol)
    a = np.abs(v)
    m = int(np.argmax(a))
    forward = m <= (n - 1) / 2
    tail = a[m:] if forward else a[m::-1]
    keep = len(tail) - int(math.ceil(trim_fraction * n))
    tail = tail[:max(keep, 0)]
    if np.any(tail < floor):
        warnings.warn("eigenvector tail underflows; fitting the range above the floor", RuntimeWarning)
        below = np.flatnonzero(tail < floor)
        tail = tail[:below[0]]
    edge = min(m, n - 1 - m)
    boundary = edge < boundary_fraction * n
    if len(tail) < min_points:
        return LocalizationProfile(H, P, m, UNCLASSIFIED, math.nan, math.nan, math.nan, math.nan)
    t = np.arange(len(tail), dtype=float)
    y = np.log(tail)
    s_exp, r2_exp = _linfit(t, y)
    s_alg, r2_alg = _linfit(np.log1p(t), y)
    half = len(t) // 2
    super_exp = False
    if half >= min_points and len(t) - half >= min_points:
        s1, _ = _linfit(t[:half], y[:half])
        s2, _ = _linfit(t[half:], y[half:])
        super_exp = -s1 > 0 and -s2 >= (1 + super_margin) * -s1
    if boundary and r2_exp >= r2_alg:
        cls = SUPER_EXPONENTIAL_BOUNDARY if super_exp else EXPONENTIAL_BOUNDARY
    elif not boundary and r2_alg > r2_exp:
        cls = ALGEBRAIC_INTERIOR
    else:
        cls = UNCLASSIFIED
    return LocalizationProfile(H, P, m, cls, float(-s_exp), float(-s_alg), float(r2_exp), float(r2_alg))


def profiles(vectors):
    """decay_profile of every column."""
    return [decay_profile(vectors[:, i]) for i in range(vectors.shape[1])]


def profiles_to_csv(path, profs):
    with open(path, "w") as fh:
        fh.write("order_index,entropy,ipr,argmax,class,exp_rate,alg_power\n")
        for i, p in enumerate(profs):
            fh.write(f"{i},{p.entropy:.17g},{p.ipr:.17g},{p.argmax_index},{p.decay_class},"
                     f"{p.exp_rate:.17g},{p.alg_power:.17g}\n")
