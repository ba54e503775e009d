"""The Fisher-Hartwig symbol a(z) = (2 - z - 1/z)**alpha * (-z)**beta.

On the unit circle z = exp(-i p) the symbol is evaluated in the form

    a(p) = 4**alpha * sin(p/2)**(2*alpha) * exp(i*beta*(pi - p)),

with Re p reduced to [0, 2*pi).  ``sin(p/2)`` has positive real part inside
that strip, so the principal power is analytic there and the same branch
serves real momenta (unit circle) and the slightly complex momenta that
label finite-n eigenvalues.  This branch reproduces the Fourier
coefficients ``t_r`` below, i.e. a(z) = sum_r t_r z**r.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln, gammasgn

from fhspec.errors import ConvergenceError, DomainError, SingularPointError
from fhspec.geometry import polyline_winding

TWO_PI = 2.0 * math.pi
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class SymbolParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")
        if self.alpha <= -0.5:
            raise DomainError(f"alpha={self.alpha} violates integrability (alpha > -1/2)")

    @property
    def determinant_admissible(self):
        """True when neither alpha+beta nor alpha-beta is a negative integer."""
        return not (_is_nonpositive_int(self.alpha + self.beta + 1) or
                    _is_nonpositive_int(self.alpha - self.beta + 1))

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta}


def _is_nonpositive_int(x, tol=_POLE_TOL):
    return x <= tol and abs(x - round(x)) <= tol


def _reduce(p):
    p = complex(p)
    return complex(p.real % TWO_PI, p.imag)


def _at_origin(p):
    return abs(p.imag) < 1e-300 and (p.real == 0.0)


def eval_symbol(params, p):
    """Return a(exp(-i p)) on the module branch."""
    p = _reduce(p)
    phase = np.exp(1j * params.beta * (math.pi - p))
    if params.alpha == 0.0:
        return complex(phase)
    if _at_origin(p):
        if params.alpha < 0:
            raise SingularPointError("symbol has a pole at p = 0 for alpha < 0")
        return 0j
    s = np.sin(p / 2.0)
    return complex(4.0 ** params.alpha * np.exp(2.0 * params.alpha * np.log(s)) * phase)


def eval_symbol_array(params, p):
    """Vectorised ``eval_symbol`` for arrays of momenta away from p = 0."""
    p = np.asarray(p, dtype=complex)
    p = np.mod(p.real, TWO_PI) + 1j * p.imag
    phase = np.exp(1j * params.beta * (math.pi - p))
    if params.alpha == 0.0:
        return phase
    with np.errstate(divide="ignore"):
        mag = 4.0 ** params.alpha * np.exp(2.0 * params.alpha * np.log(np.sin(p / 2.0)))
    return mag * phase


def symbol_derivative(params, p, guard=1e-8):
    """da/dp = (alpha * cot(p/2) - i*beta) * a(p).

    The logarithmic derivative is singular only at p = 0 (mod 2 pi); within
    ``guard`` of that point a central difference is returned when the
    symbol itself is finite there, otherwise a SingularPointError.
    """
    p = _reduce(p)
    a = eval_symbol(params, p)
    if params.alpha == 0.0:
        return -1j * params.beta * a
    dist = min(abs(p), abs(p - TWO_PI))
    if dist <= guard:
        if params.alpha < 0.5:
            raise SingularPointError("derivative diverges at p = 0 for alpha < 1/2")
        h = 10 * guard
        return (eval_symbol(params, p + h) - eval_symbol(params, p - h + TWO_PI)) / (2 * h)
    return complex((params.alpha / np.tan(p / 2.0) - 1j * params.beta) * a)


def fourier_coefficient(params, r):
    """t_r = (-1)**r Gamma(2a+1) / [Gamma(a+b+1-r) Gamma(a-b+1+r)].

    Poles of the denominator Gammas give t_r = 0.
    """
    r = int(r)
    x1 = params.alpha + params.beta + 1.0 - r
    x2 = params.alpha - params.beta + 1.0 + r
    if _is_nonpositive_int(x1) or _is_nonpositive_int(x2):
        return 0.0
    sign = (-1.0) ** (r % 2) * gammasgn(x1) * gammasgn(x2)
    log_mag = gammaln(2.0 * params.alpha + 1.0) - gammaln(x1) - gammaln(x2)
    return float(sign * math.exp(log_mag))


def fourier_coefficients(params, rs):
    return np.array([fourier_coefficient(params, r) for r in rs], dtype=float)


def symbol_curve(params, grid=1024):
    """Sample a(exp(i theta)) for theta in [0, 2 pi), i.e. the symbol image
    traversed counter-clockwise in z.  Midpoint sampling avoids z = 1."""
    theta = TWO_PI * (np.arange(grid) + 0.5) / grid
    return eval_symbol_array(params, TWO_PI - theta)


def winding_number(params, point, grid=1024, tol=1e-9):
    """Winding number of the symbol image about ``point``.

    Uses the orientation z = exp(i theta), theta: 0 -> 2 pi, so that a
    negative jump exponent (-1 < beta < 0) yields -1.
    """
    if grid < 256:
        raise DomainError("winding_number needs grid >= 256")
    curve = symbol_curve(params, grid)
    return polyline_winding(curve, complex(point), tol=tol)


@dataclass(frozen=True)
class Momentum:
    p: complex
    residual: float = 0.0
    iterations: int = 0

    @property
    def real(self):
        return self.p.real

    @property
    def imag(self):
        return self.p.imag


def _newton(params, E, p0, tol, max_iter=100, max_step=0.5):
    p = _reduce(p0)
    scale = tol * (1.0 + abs(E))
    for it in range(max_iter):
        if abs(p.real) < 1e-6:
            p = complex(1e-6, p.imag)
        f = eval_symbol(params, p) - E
        if abs(f) <= scale:
            return p, abs(f), it
        try:
            step = -f / symbol_derivative(params, p)
        except (SingularPointError, ZeroDivisionError):
            return p, abs(f), it
        if abs(step) > max_step:
            step *= max_step / abs(step)
        p = _reduce(p + step)
    return p, abs(eval_symbol(params, p) - E), max_iter


def invert_symbol(params, E, guess, tol=1e-10, max_iter=100, restarts=8):
    """Solve a(exp(-i p)) = E for the momentum p by damped Newton iteration.

    Starts from ``guess``; on failure retries from ``restarts`` deterministic
    perturbations of it before raising ConvergenceError.
    """
    E = complex(E)
    starts = [complex(guess)]
    for k in range(restarts):
        ang = TWO_PI * k / restarts
        starts.append(complex(guess) + 0.05 * (k // 2 + 1) * complex(math.cos(ang), 0.2 * math.sin(ang)))
    best = None
    for s in starts:
        p, res, it = _newton(params, E, s, tol, max_iter)
        if res <= tol * (1.0 + abs(E)):
            return Momentum(p=p, residual=res, iterations=it)
        if best is None or res < best[1]:
            best = (p, res)
    raise ConvergenceError(f"symbol inversion failed for E={E}", residual=best[1])


def asymptotic_momentum(n, ell, params):
    """p = 2 pi ell / n + i (2 alpha + 1) ln n / n (O(1/n) term dropped)."""
    return Momentum(p=complex(TWO_PI * ell / n, (2 * params.alpha + 1) * math.log(n) / n))


def asymptotic_eigenvalue(params, n, ell):
    """(-1)**beta 4**alpha sin(pi ell/n)**(2 alpha) exp(-2 i pi beta ell / n)."""
    a, b = params.alpha, params.beta
    s = math.sin(math.pi * ell / n)
    mag = 4.0 ** a * (s ** (2 * a) if s > 0 else (0.0 if a > 0 else math.inf))
    return complex(mag * np.exp(1j * math.pi * b) * np.exp(-2j * math.pi * b * ell / n))


def _decay(n, params):
    return (2 * params.alpha + 1) * math.log(n) / n


def asymptotic_right_eigenvector(params, n, ell):
    """Unit-norm (asymptotically) geometric right eigenvector."""
    gamma = _decay(n, params)
    j = np.arange(n)
    pref = math.sqrt(2 * (1 + 2 * params.alpha) * math.log(n) / n)
    return pref * np.exp((2j * math.pi * ell / n - gamma) * j)


def asymptotic_left_eigenvector(params, n, ell):
    """Left eigenvector dual to ``asymptotic_right_eigenvector``.

    The prefactor 1 / sqrt(2 (1 + 2 alpha) n ln n) makes sum_j left_j right_j
    equal to one, as required by biorthogonality.
    """
    if params.alpha <= -0.5:
        raise DomainError("left eigenvector undefined for alpha = -1/2")
    gamma = _decay(n, params)
    j = np.arange(n)
    pref = 1.0 / math.sqrt(2 * (1 + 2 * params.alpha) * n * math.log(n))
    return pref * np.exp(-(2j * math.pi * ell / n - gamma) * j)
