"""Dense Toeplitz matrices of the symbol and closed-form trace/determinant."""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy.special import gammaln

from fhspec.errors import CapacityError, DomainError
from fhspec.symbol import SymbolParams, fourier_coefficient

MAX_DIMENSION = 4096
EULER_GAMMA = 0.5772156649015329
_PRODUCT_TERMS = 100_000


@dataclass(frozen=True)
class ToeplitzMatrix:
    n: int
    entries: np.ndarray = field(repr=False)
    params: SymbolParams

    def __post_init__(self):
        self.entries.setflags(write=False)

    def coefficient(self, r):
        """t_r, read off the first column (r >= 0) or first row (r < 0)."""
        return self.entries[r, 0] if r >= 0 else self.entries[0, -r]

    def to_csv(self, path):
        np.savetxt(path, self.entries, delimiter=",", fmt="%.17g")
        meta = {"n": self.n, "alpha": self.params.alpha, "beta": self.params.beta}
        with open(str(path) + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)


def build_toeplitz(params, n, max_dimension=MAX_DIMENSION):
    """T[j, k] = t_{j-k}."""
    n = int(n)
    if n < 2:
        raise DomainError(f"n={n}: need n >= 2")
    if n > max_dimension:
        raise CapacityError(f"n={n} exceeds the configured cap of {max_dimension}")
    t = {r: fourier_coefficient(params, r) for r in range(-(n - 1), n)}
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    lookup = np.array([t[r] for r in range(-(n - 1), n)])
    return ToeplitzMatrix(n=n, entries=lookup[diff + n - 1], params=params)


def _log_g_base(x):
    """ln G(x) for x in (1, 2] from the Weierstrass product of G(1+z), z = x-1.

    Each factor contributes k*log1p(z/k) - z + z^2/(2k) = z^3/(3k^2) - ...;
    the first N terms are summed exactly and the remainder by the leading
    three terms of that expansion with Euler-Maclaurin estimates of the
    zeta tails.
    """
    z = x - 1.0
    if z == 0.0:
        return 0.0
    N = _PRODUCT_TERMS
    k = np.arange(1, N + 1, dtype=float)
    terms = k * np.log1p(z / k) - z + z * z / (2.0 * k)
    s2 = 1.0 / N - 1.0 / (2 * N**2) + 1.0 / (6 * N**3)
    s3 = 1.0 / (2 * N**2) - 1.0 / (2 * N**3)
    s4 = 1.0 / (3 * N**3)
    tail = z**3 / 3 * s2 - z**4 / 4 * s3 + z**5 / 5 * s4
    head = 0.5 * z * math.log(2 * math.pi) - 0.5 * (z + 1) * z - 0.5 * EULER_GAMMA * z * z
    return math.fsum([head, math.fsum(terms.tolist()), tail])


def log_barnes_g(x):
    """ln G(x) for real x > 0 (G is positive there)."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_barnes_g requires x > 0, got {x}")
    if x <= 1.0:
        # G(x) = G(x + 1) / Gamma(x)
        return log_barnes_g(x + 1.0) - float(gammaln(x))
    m = math.ceil(x - 2.0) if x > 2.0 else 0
    base = x - m
    if base == 2.0:  # integers: recurse down to G(1) = 1 exactly
        base, m = 1.0, m + 1
    # G(base + m) = G(base) * prod_{i<m} Gamma(base + i)
    parts = [_log_g_base(base)]
    if m:
        parts.extend(gammaln(base + np.arange(m)).tolist())
    return math.fsum(parts)


def closed_form_trace(params, n):
    """n * Gamma(2a+1) / [Gamma(a+b+1) Gamma(a-b+1)], which is n * t_0."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return n * fourier_coefficient(params, 0)


def closed_form_log_determinant(params, n):
    """(log|det T_n|, sign) from the Barnes-G product formula."""
    a, b = params.alpha, params.beta
    if not (1 + a + b > 0 and 1 + a - b > 0):
        raise DomainError(
            f"determinant formula needs 1+alpha+beta > 0 and 1+alpha-beta > 0 (got alpha={a}, beta={b})")
    if not params.determinant_admissible:
        raise DomainError("alpha +/- beta is a negative integer")
    if n < 1:
        raise DomainError("n must be >= 1")
    lg = log_barnes_g
    parts = [lg(1 + a + b), lg(1 + a - b), -lg(1 + 2 * a),
             lg(1 + n), lg(1 + n + 2 * a), -lg(1 + n + a + b), -lg(1 + n + a - b)]
    return math.fsum(parts), 1.0


def closed_form_determinant(params, n):
    logdet, sign = closed_form_log_determinant(params, n)
    return sign * math.exp(logdet)
