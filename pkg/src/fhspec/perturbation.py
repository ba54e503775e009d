"""Non-Hermitian perturbation theory for T + sigma V with diagonal V.

Everything is expressed through the matrix of V in the eigenbasis,
M = Psi^{-1} V Psi, i.e. M[l, j] = <left_l | V | right_j>.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from fhspec.errors import DegeneracyError, DomainError
from fhspec.rng import pmap, stream

GAP_TOL = 1e-12


@dataclass(frozen=True)
class DiagonalPerturbation:
    v: np.ndarray
    variance: float = 1.0  # E(v^2) of the generating distribution

    @property
    def n(self):
        return len(self.v)

    @property
    def norm(self):
        return float(np.max(np.abs(self.v)))

    def matrix(self):
        return np.diag(self.v)

    @classmethod
    def standard_normal(cls, n, rng):
        return cls(v=rng.standard_normal(n), variance=1.0)

    @classmethod
    def complex_normal(cls, n, rng):
        """Independent standard complex normals: E|v|^2 = 1 but E(v^2) = 0."""
        v = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        return cls(v=v, variance=0.0)

    @classmethod
    def indicator(cls, n, j):
        v = np.zeros(n)
        v[j] = 1.0
        return cls(v=v, variance=float("nan"))


def draw_perturbation(n, seed, name="disorder", trial=0, kind="real"):
    rng = stream(seed, name, trial)
    if kind == "real":
        return DiagonalPerturbation.standard_normal(n, rng)
    if kind == "complex":
        return DiagonalPerturbation.complex_normal(n, rng)
    raise DomainError(f"unknown disorder kind {kind!r}")


def _values(V):
    return V.v if isinstance(V, DiagonalPerturbation) else np.asarray(V)


def _check(spec, v):
    if len(v) != spec.n:
        raise DomainError(f"perturbation has length {len(v)}, spectrum has n={spec.n}")


def eigenbasis_matrix(spec, V):
    v = _values(V)
    _check(spec, v)
    return (spec.left * v[None, :]) @ spec.right


def weights(spec):
    """W[l, m] = left_l[m] * right_l[m]; E1 = W @ v."""
    return spec.left * spec.right.T


def _inverse_gaps(spec, tol=GAP_TOL):
    E = spec.eigenvalues
    D = E[:, None] - E[None, :]
    np.fill_diagonal(D, np.inf)
    scale = max(float(np.max(np.abs(E))), 1.0)
    small = np.abs(D) <= tol * scale
    if np.any(small):
        l, j = np.argwhere(small)[0]
        raise DegeneracyError(f"eigenvalue gap underflow between {l} and {j}",
                              gap=float(abs(D[l, j])), pair=(int(l), int(j)))
    return 1.0 / D


def bulk_indices(spec, ratio=5.0):
    """Indices whose condition number is below ``ratio`` times the median."""
    return np.flatnonzero(spec.kappa < ratio * np.median(spec.kappa))


def first_order(spec, V):
    """E1_l = <left_l | V | right_l>."""
    v = _values(V)
    _check(spec, v)
    return weights(spec) @ v


def second_order(spec, V, M=None):
    """E2_l = sum_{j != l} M[l, j] M[j, l] / (E_l - E_j)."""
    if M is None:
        M = eigenbasis_matrix(spec, V)
    G = _inverse_gaps(spec)
    return np.sum(M * M.T * G, axis=1)


def second_order_terms(spec, V, ell):
    """Per-j contributions to E2 of eigenvalue ``ell`` (zero at j = ell)."""
    M = eigenbasis_matrix(spec, V)
    G = _inverse_gaps(spec)[ell]
    G[ell] = 0.0
    return M[ell, :] * M[:, ell] * G


def expected_second_order(spec, variance, form="closed"):
    """Average of E2 over zero-mean independent diagonal disorder.

    ``form="closed"`` uses the asymptotic eigenvectors, for which every
    product left_l[m] right_l[m] left_j[m] right_j[m] averages to 1/n^2, so
    that E(E2_l) = (variance / n) sum_{j != l} 1 / (E_l - E_j).
    ``form="exact"`` keeps the exact eigenvectors:
    E(E2_l) = variance * sum_j (W W^T)[l, j] / (E_l - E_j).
    """
    G = _inverse_gaps(spec)
    if form == "closed":
        return variance / spec.n * np.sum(np.where(np.isfinite(G), G, 0.0), axis=1)
    if form == "exact":
        W = weights(spec)
        return variance * np.sum((W @ W.T) * G, axis=1)
    raise DomainError(f"unknown form {form!r}")


@dataclass(frozen=True)
class AttractionTerm:
    ell: int
    partner: int
    closed: complex
    exact: complex


def conjugate_partner(spec, ell, tol=1e-8):
    E = spec.eigenvalues
    scale = max(float(np.max(np.abs(E))), 1.0)
    if abs(E[ell].imag) <= tol * scale:
        raise DomainError(f"eigenvalue {ell} is real: no conjugate partner")
    d = np.abs(E - np.conj(E[ell]))
    d[ell] = np.inf
    j = int(np.argmin(d))
    if d[j] > 1e-6 * scale:
        raise DomainError(f"eigenvalue {ell} has no conjugate partner in the spectrum")
    return j


def conjugate_attraction(spec, ell, variance):
    """Contribution of the conjugate partner to E(E2_ell).

    closed: -i * variance / (2 n Im E_ell), from the asymptotic vectors;
    exact:  variance * sum_m W[l, m] W[lbar, m] / (E_l - E_lbar), which for a
            real matrix is sum_m |right_m|^2 |left_m|^2 variance / (E - conj E).
    """
    j = conjugate_partner(spec, ell)
    E = spec.eigenvalues[ell]
    closed = -1j * variance / (2.0 * spec.n * E.imag)
    W = weights(spec)
    exact = variance * np.sum(W[ell] * W[j]) / (E - spec.eigenvalues[j])
    return AttractionTerm(ell=int(ell), partner=j, closed=complex(closed), exact=complex(exact))


@dataclass(frozen=True)
class PerturbedVectors:
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    predicted_kappa: np.ndarray = field(repr=False)


def first_order_eigvec(spec, V, sigma, M=None, warn=True):
    """First-order left/right eigenvectors and the predicted condition numbers.

    left_pert_l  = left_l  + sigma sum_{j != l} M[l, j] / (E_l - E_j) left_j
    right_pert_l = right_l + sigma sum_{j != l} M[j, l] / (E_l - E_j) right_j
    predicted_kappa_l = ||left_pert_l||.
    """
    if M is None:
        M = eigenbasis_matrix(spec, V)
    G = _inverse_gaps(spec)
    G = np.where(np.isfinite(G), G, 0.0)
    gap = spec.min_gap if np.isfinite(spec.min_gap) else np.inf
    vnorm = _vnorm(V)
    if warn and sigma * vnorm > gap:
        warnings.warn(f"sigma*||V|| = {sigma * vnorm:.3g} exceeds the minimum gap {gap:.3g}; "
                      "first-order eigenvectors are unreliable", RuntimeWarning, stacklevel=2)
    C = M * G
    left = spec.left + sigma * (C @ spec.left)
    right = spec.right + sigma * (spec.right @ (M * G.T))
    kappa = np.linalg.norm(left, axis=1)
    return PerturbedVectors(left=left, right=right, predicted_kappa=kappa)


def _vnorm(V):
    return float(np.max(np.abs(_values(V))))


@dataclass(frozen=True)
class PerturbationReport:
    sigma: float
    E0: np.ndarray = field(repr=False)
    E1: np.ndarray = field(repr=False)
    E2: np.ndarray = field(repr=False)
    expectedE2: np.ndarray = field(repr=False)
    predicted_kappa: np.ndarray = field(repr=False)

    @property
    def predicted(self):
        return self.E0 + self.sigma * self.E1 + self.sigma ** 2 * self.E2

    def predicted_at(self, sigma):
        return self.E0 + sigma * self.E1 + sigma ** 2 * self.E2

    def to_csv(self, path):
        cols = [self.E0, self.E1, self.E2, self.predicted, self.expectedE2]
        names = ["E0", "E1", "E2", "predicted", "expectedE2"]
        head = ["order_index"] + [f"{p}_{nm}" for nm in names for p in ("re", "im")] + ["predicted_kappa"]
        with open(path, "w") as fh:
            fh.write(",".join(head) + "\n")
            for i in range(len(self.E0)):
                vals = [x for c in cols for x in (c[i].real, c[i].imag)] + [self.predicted_kappa[i]]
                fh.write(f"{i}," + ",".join(f"{x:.17g}" for x in vals) + "\n")


def perturbation_report(spec, V, sigma, variance=None):
    M = eigenbasis_matrix(spec, V)
    if variance is None:
        variance = V.variance if isinstance(V, DiagonalPerturbation) else 1.0
    return PerturbationReport(
        sigma=float(sigma),
        E0=spec.eigenvalues.copy(),
        E1=np.diag(M).copy(),
        E2=second_order(spec, V, M=M),
        expectedE2=expected_second_order(spec, variance),
        predicted_kappa=first_order_eigvec(spec, V, sigma, M=M, warn=False).predicted_kappa,
    )


def displacement_bound(spec, V, sigma):
    """sigma ||V|| kappa(E0): first-order bound on |E(sigma) - E0|."""
    return sigma * _vnorm(V) * spec.kappa


@dataclass(frozen=True)
class MonteCarloMean:
    mean: np.ndarray
    stderr: np.ndarray
    draws: int


def monte_carlo_first_order(spec, draws, seed, name="mc-first-order"):
    """Mean and standard error of E1 over standard-normal diagonal draws."""
    W = weights(spec)
    V = np.column_stack([stream(seed, name, t).standard_normal(spec.n) for t in range(draws)])
    E1 = W @ V
    mean = E1.mean(axis=1)
    se = (E1.real.std(axis=1, ddof=1) + 1j * E1.imag.std(axis=1, ddof=1)) / np.sqrt(draws)
    return MonteCarloMean(mean=mean, stderr=se, draws=draws)


def monte_carlo_second_order(spec, draws, seed, name="mc-second-order", threads=None):
    """Sample mean of E2 over standard-normal diagonal draws."""
    def one(t):
        return second_order(spec, stream(seed, name, t).standard_normal(spec.n))
    vals = pmap(one, range(draws), threads=threads)
    return np.mean(vals, axis=0)
