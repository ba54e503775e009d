"""Sigma sweeps of T + sigma V and the bulk / runaway classification."""

from dataclasses import dataclass, field, asdict
import json
import os

import numpy as np

from fhspec.errors import DomainError, FHSpecError
from fhspec.perturbation import DiagonalPerturbation, draw_perturbation, perturbation_report
from fhspec.spectral import eig_full, sort_by_momentum, track_adaptive
from fhspec.toeplitz import build_toeplitz

BULK, RUNAWAY_I, RUNAWAY_II = "Bulk", "RunawayI", "RunawayII"


@dataclass(frozen=True)
class Thresholds:
    eps_real: float = 1e-6      # relative to the sigma=0 spectrum diameter
    kappa_ratio: float = 10.0   # against the sigma=0 median condition number
    pred_tol: float = 0.05      # relative to the diameter
    collision_tol: float = 1e-4

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ClassLabel:
    kind: str
    kappa_ratio: float
    pred_error: float
    collision_sigma: float = None
    partner: int = None
    within_pred_tol: bool = True


@dataclass
class SigmaSweep:
    params: object
    n: int
    seed: int
    V: DiagonalPerturbation
    trajectories: object
    report: object
    labels: list = None
    thresholds: Thresholds = None

    @property
    def sigma_grid(self):
        return self.trajectories.sigma_grid

    @property
    def diameter(self):
        E0 = self.trajectories.paths[0]
        return float(np.max(np.abs(E0[:, None] - E0[None, :])))

    def matrix(self, sigma):
        return build_toeplitz(self.params, self.n).entries + sigma * np.diag(self.V.v)

    def counts(self):
        out = {BULK: 0, RUNAWAY_I: 0, RUNAWAY_II: 0}
        for lab in self.labels or []:
            out[lab.kind] += 1
        return out

    def manifest(self):
        return {
            "seed": self.seed, "n": self.n,
            "alpha": self.params.alpha, "beta": self.params.beta,
            "grid": [float(s) for s in self.sigma_grid],
            "thresholds": self.thresholds.to_dict() if self.thresholds else None,
            "labels": [lab.kind for lab in self.labels] if self.labels else None,
            "collision_sigmas": {str(i): lab.collision_sigma for i, lab in enumerate(self.labels or [])
                                 if lab.collision_sigma is not None},
            "counts": self.counts(),
        }

    def export(self, directory):
        os.makedirs(directory, exist_ok=True)
        files = []
        traj = self.trajectories
        for k, s in enumerate(traj.sigma_grid):
            path = os.path.join(directory, f"sweep_{k:03d}.csv")
            with open(path, "w") as fh:
                fh.write("order_index,sigma,re_E,im_E,kappa\n")
                for l in range(self.n):
                    E = traj.paths[k, l]
                    fh.write(f"{l},{s:.17g},{E.real:.17g},{E.imag:.17g},{traj.kappa[k, l]:.17g}\n")
            files.append(path)
        path = os.path.join(directory, "report.csv")
        self.report.to_csv(path)
        files.append(path)
        path = os.path.join(directory, "classification.json")
        with open(path, "w") as fh:
            json.dump(self.manifest(), fh, indent=2, sort_keys=True)
        files.append(path)
        return files


def standard_grid(sigma_max, points):
    return np.linspace(0.0, sigma_max, points)


def sigma_sweep(params, n, V=None, sigma_grid=(0.0,), seed=0, kind="real", threads=None,
                keep_spectra=True):
    """Decompose T + sigma V along the grid and track eigenvalue paths.

    Paths are labelled by the momentum order of the sigma=0 spectrum.  When
    ``V`` is omitted it is drawn from the run seed's "disorder" stream.
    """
    grid = np.asarray(sigma_grid, dtype=float)
    if grid.size == 0 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise DomainError("sigma grid must be strictly ascending and start at 0")
    if V is None:
        V = draw_perturbation(n, seed, kind=kind)
    T = build_toeplitz(params, n).entries
    D = np.diag(V.v)
    spec0 = sort_by_momentum(eig_full(T), params)

    def solve(s):
        return eig_full(T + s * D)

    traj = track_adaptive(solve, grid, first=spec0, keep_spectra=keep_spectra, threads=threads)
    report = perturbation_report(spec0, V, float(grid[-1]))
    return SigmaSweep(params=params, n=n, seed=seed, V=V, trajectories=traj, report=report)


def _pair_real(E, z, eps):
    """True when the two eigenvalues nearest to z are both real."""
    idx = np.argsort(np.abs(E - z))[:2]
    return bool(np.all(np.abs(E[idx].imag) <= eps))


def _collision_sigma(sweep, l, k, eps, tol):
    """Bisect on (sigma_{k-1}, sigma_k] for the onset of realness of path l."""
    traj = sweep.trajectories
    lo, hi = traj.sigma_grid[k - 1], traj.sigma_grid[k]
    T = build_toeplitz(sweep.params, sweep.n).entries
    D = np.diag(sweep.V.v)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        try:
            E = np.linalg.eigvals(T + mid * D)
        except np.linalg.LinAlgError:
            break
        z = 0.5 * (traj.paths[k - 1, l].real + traj.paths[k, l].real)
        if _pair_real(E, z, eps):
            hi = mid
        else:
            lo = mid
    return float(hi)


def classify_eigenpairs(sweep, thresholds=None):
    """Label each path Bulk, RunawayI (conjugate collision onto the real axis)
    or RunawayII (condition number grows past kappa_ratio x median)."""
    th = thresholds or Thresholds()
    traj = sweep.trajectories
    P = traj.paths
    n = P.shape[1]
    diam = sweep.diameter
    eps = th.eps_real * diam
    E0 = P[0]
    kmed = float(np.median(traj.kappa[0]))
    kratio = traj.kappa.max(axis=0) / kmed
    pred = sweep.report.predicted_at(traj.sigma_grid[-1])
    pred_err = np.abs(P[-1] - pred)
    real = np.abs(P.imag) <= eps
    # first index k* from which the path stays real to the end
    tail_real = np.flip(np.logical_and.accumulate(np.flip(real, axis=0), axis=0), axis=0)
    onset = np.where(tail_real.any(axis=0), np.argmax(tail_real, axis=0), -1)
    partner = np.full(n, -1)
    for l in range(n):
        if not real[0, l]:
            d = np.abs(E0 - np.conj(E0[l]))
            d[l] = np.inf
            j = int(np.argmin(d))
            if d[j] <= 1e-6 * max(diam, 1.0):
                partner[l] = j
    labels = []
    for l in range(n):
        j = partner[l]
        collided = (j >= 0 and onset[l] > 0 and onset[j] > 0)
        common = dict(kappa_ratio=float(kratio[l]), pred_error=float(pred_err[l]),
                      within_pred_tol=bool(pred_err[l] <= th.pred_tol * diam))
        if collided:
            k = int(onset[l])
            labels.append(ClassLabel(kind=RUNAWAY_I, partner=int(j),
                                     collision_sigma=_collision_sigma(sweep, l, k, eps, th.collision_tol),
                                     **common))
        elif kratio[l] >= th.kappa_ratio:
            labels.append(ClassLabel(kind=RUNAWAY_II, **common))
        else:
            labels.append(ClassLabel(kind=BULK, **common))
    sweep.labels = labels
    sweep.thresholds = th
    return labels


def archetypes(sweep):
    """One representative path per class: the RunawayI path with the earliest
    collision, the RunawayII path with the largest kappa ratio and the Bulk
    path with the median kappa ratio among Bulk paths.  Missing classes map
    to None."""
    out = {BULK: None, RUNAWAY_I: None, RUNAWAY_II: None}
    labs = sweep.labels
    ones = [l for l, c in enumerate(labs) if c.kind == RUNAWAY_I]
    if ones:
        out[RUNAWAY_I] = min(ones, key=lambda l: labs[l].collision_sigma)
    twos = [l for l, c in enumerate(labs) if c.kind == RUNAWAY_II]
    if twos:
        out[RUNAWAY_II] = max(twos, key=lambda l: labs[l].kappa_ratio)
    bulk = [l for l, c in enumerate(labs) if c.kind == BULK]
    if bulk:
        bulk.sort(key=lambda l: labs[l].kappa_ratio)
        out[BULK] = bulk[len(bulk) // 2]
    return out


def multi_seed(params, n, seeds, sigma_grid, thresholds=None, kind="real"):
    """Label counts for several disorder realisations (genericity check)."""
    rows = []
    for s in seeds:
        try:
            sw = sigma_sweep(params, n, sigma_grid=sigma_grid, seed=s, kind=kind, keep_spectra=False)
        except FHSpecError as exc:
            rows.append({"seed": s, "error": str(exc)})
            continue
        classify_eigenpairs(sw, thresholds)
        rows.append({"seed": s, **sw.counts()})
    return rows
