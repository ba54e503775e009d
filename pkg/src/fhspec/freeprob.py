"""Free (Haar-rotated) and classical (permuted) models of the disordered DOS.

For a diagonalised T = Psi Lambda Psi^{-1}, the exact ensemble T + sigma V is
compared with two surrogates that discard the eigenvector geometry:

* free:      Q^T Lambda Q + sigma V with Haar orthogonal Q,
* classical: Pi^T Lambda Pi + sigma V with a uniform permutation Pi, whose
             eigenvalues are simply E_{pi(i)} + sigma v_i.

Lambda is taken as the real block-diagonal form of the spectrum (2x2
rotation-scaling blocks for conjugate pairs) so the free model stays a real
matrix and keeps the conjugation symmetry of the exact ensemble.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from fhspec.errors import DomainError, FHSpecError
from fhspec.rng import pmap, stream
from fhspec.spectral import eig_full

BINS = 128
MARGIN = 0.05


def sample_haar_orthogonal(n, rng):
    """Haar orthogonal matrix: QR of a Gaussian matrix with R's diagonal made positive."""
    if n < 1:
        raise DomainError("n must be >= 1")
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d[None, :]


def real_block_diagonal(eigenvalues, tol=1e-10):
    """Real matrix with the given (conjugation-closed) spectrum: 1x1 blocks for
    real eigenvalues and [[a, b], [-b, a]] blocks for pairs a +/- ib."""
    E = np.asarray(eigenvalues, dtype=complex)
    n = len(E)
    scale = max(float(np.max(np.abs(E))), 1.0) if n else 1.0
    real = np.abs(E.imag) <= tol * scale
    upper = E[(~real) & (E.imag > 0)]
    lower = E[(~real) & (E.imag < 0)]
    if len(upper) != len(lower):
        raise DomainError("spectrum is not closed under conjugation")
    L = np.zeros((n, n))
    i = 0
    for e in E[real]:
        L[i, i] = e.real
        i += 1
    for e in upper:
        L[i:i + 2, i:i + 2] = [[e.real, e.imag], [-e.imag, e.real]]
        i += 2
    return L


@dataclass(frozen=True)
class DosHistogram:
    axis: str
    edges: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    sample_count: int = 0

    def __post_init__(self):
        if self.axis not in ("Re", "Im"):
            raise DomainError("axis must be 'Re' or 'Im'")

    def cdf(self):
        return np.concatenate([[0.0], np.cumsum(self.mass)])

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("bin_left,bin_right,mass\n")
            for a, b, m in zip(self.edges[:-1], self.edges[1:], self.mass):
                fh.write(f"{a:.17g},{b:.17g},{m:.17g}\n")


def common_edges(samples, bins=BINS, margin=MARGIN):
    """Uniform edges over the pooled range of ``samples`` widened by ``margin``."""
    lo = min(float(np.min(s)) for s in samples)
    hi = max(float(np.max(s)) for s in samples)
    pad = margin * (hi - lo) if hi > lo else max(abs(lo), 1.0) * margin
    return np.linspace(lo - pad, hi + pad, bins + 1)


def histogram(values, axis, edges):
    values = np.asarray(values, dtype=float)
    counts, _ = np.histogram(values, bins=edges)
    mass = counts / counts.sum()
    return DosHistogram(axis=axis, edges=np.asarray(edges), mass=mass, sample_count=int(values.size))


def dos_distance(h1, h2):
    """Kolmogorov distance between the CDFs of two histograms.

    The CDFs are compared at every edge of the common refinement, each CDF
    being interpolated linearly inside its own bins.
    """
    if h1.axis != h2.axis:
        raise DomainError(f"axis mismatch: {h1.axis} vs {h2.axis}")
    grid = np.union1d(h1.edges, h2.edges)
    F1 = np.interp(grid, h1.edges, h1.cdf(), left=0.0, right=1.0)
    F2 = np.interp(grid, h2.edges, h2.cdf(), left=0.0, right=1.0)
    return float(np.max(np.abs(F1 - F2)))


@dataclass
class Ensemble:
    """Pooled eigenvalues of one model plus solver failures."""
    name: str
    values: np.ndarray
    failures: int = 0


def _pool(name, results):
    ok = [r for r in results if r is not None]
    vals = np.concatenate(ok) if ok else np.empty(0, dtype=complex)
    return Ensemble(name=name, values=vals, failures=len(results) - len(ok))


def exact_ensemble(T, sigma, trials, seed, threads=None):
    n = T.shape[0]

    def one(t):
        v = stream(seed, "freeprob-disorder", t).standard_normal(n)
        try:
            return np.linalg.eigvals(T + sigma * np.diag(v))
        except np.linalg.LinAlgError:
            return None
    return _pool("exact", pmap(one, range(trials), threads=threads))


def free_ensemble(spec, sigma, trials, seed, threads=None):
    """Eigenvalues of Q^T Lambda Q + sigma V, fresh Q and V each trial.

    Each trial goes through eig_full; failures are skipped and counted.
    """
    L = real_block_diagonal(spec.eigenvalues)
    n = spec.n

    def one(t):
        Q = sample_haar_orthogonal(n, stream(seed, "freeprob-haar", t))
        v = stream(seed, "freeprob-disorder", t).standard_normal(n)
        try:
            return eig_full(Q.T @ L @ Q + sigma * np.diag(v)).eigenvalues
        except FHSpecError:
            return None
    return _pool("free", pmap(one, range(trials), threads=threads))


def classical_ensemble(spec, sigma, trials, seed):
    """E_{pi(i)} + sigma v_i with a uniform permutation pi and fresh v per trial."""
    n = spec.n
    out = []
    for t in range(trials):
        pi = stream(seed, "freeprob-permutation", t).permutation(n)
        v = stream(seed, "freeprob-disorder", t).standard_normal(n)
        out.append(spec.eigenvalues[pi] + sigma * v)
    return _pool("classical", out)


def _check_trials(trials):
    if trials < 1:
        raise DomainError("trials must be >= 1")


def free_approximation_dos(spec, sigma, trials, seed, bins=BINS, edges=None):
    _check_trials(trials)
    ens = free_ensemble(spec, sigma, trials, seed)
    return _histograms(ens, bins, edges)


def classical_approximation_dos(spec, sigma, trials, seed, bins=BINS, edges=None):
    _check_trials(trials)
    ens = classical_ensemble(spec, sigma, trials, seed)
    return _histograms(ens, bins, edges)


def _histograms(ens, bins, edges):
    e = edges or {}
    re_edges = e.get("Re") if e.get("Re") is not None else common_edges([ens.values.real], bins)
    im_edges = e.get("Im") if e.get("Im") is not None else common_edges([ens.values.imag], bins)
    return histogram(ens.values.real, "Re", re_edges), histogram(ens.values.imag, "Im", im_edges)


@dataclass
class DosComparison:
    sigma: float
    trials: int
    seed: int
    histograms: dict
    distances: dict
    failures: dict

    def manifest(self):
        return {"sigma": self.sigma, "trials": self.trials, "seed": self.seed,
                "distances": self.distances, "failures": self.failures, "bins": BINS,
                "margin": MARGIN}

    def export(self, directory):
        import os
        os.makedirs(directory, exist_ok=True)
        files = []
        for (model, axis), h in sorted(self.histograms.items()):
            path = os.path.join(directory, f"dos_{model}_{axis}.csv")
            h.to_csv(path)
            files.append(path)
        path = os.path.join(directory, "dos.json")
        with open(path, "w") as fh:
            json.dump(self.manifest(), fh, indent=2, sort_keys=True)
        files.append(path)
        return files


def compare_dos(T, spec, sigma, trials, seed, bins=BINS, threads=None):
    """Exact, free and classical ensembles on shared bins, with Kolmogorov
    distances of each surrogate to the exact ensemble on both axes.

    All three models draw V from the same trial-indexed stream, so the
    comparison carries matched sampling noise.
    """
    _check_trials(trials)
    ens = {
        "exact": exact_ensemble(T, sigma, trials, seed, threads),
        "free": free_ensemble(spec, sigma, trials, seed, threads),
        "classical": classical_ensemble(spec, sigma, trials, seed),
    }
    hists, dist = {}, {}
    for axis, part in (("Re", np.real), ("Im", np.imag)):
        edges = common_edges([part(e.values) for e in ens.values()], bins)
        for name, e in ens.items():
            hists[(name, axis)] = histogram(part(e.values), axis, edges)
        for name in ("free", "classical"):
            dist[f"{name}_{axis}"] = dos_distance(hists[(name, axis)], hists[("exact", axis)])
    return DosComparison(sigma=float(sigma), trials=int(trials), seed=int(seed), histograms=hists,
                         distances=dist, failures={k: e.failures for k, e in ens.items()})
