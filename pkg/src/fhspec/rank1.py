"""Rank-one perturbations T + sigma A_jk with A_jk = e_j e_k^T.

Eigenvalues of the perturbed matrix that are not eigenvalues of T solve
[R(lambda)]_{kj} = -1/sigma with R(lambda) = (T - lambda)^{-1}.  Indices in
this module are 0-based; the experiment families are labelled 1-based
(A_11 is the top-left corner) and converted by ``family_indices``.
"""

from dataclasses import dataclass, field, asdict
import json

import numpy as np

from fhspec.errors import DomainError, OnCurveError, PoleError
from fhspec.geometry import hull_centroid, polyline_winding
from fhspec.perturbation import first_order
from fhspec.spectral import eig_full, sort_by_momentum, track_adaptive
from fhspec.toeplitz import build_toeplitz

FAMILIES = ("jj", "1k", "j1")


@dataclass(frozen=True)
class RankOnePerturbation:
    j: int
    k: int
    sigma: float

    def check(self, n):
        if not (0 <= self.j < n and 0 <= self.k < n):
            raise DomainError(f"A_({self.j},{self.k}) outside a {n}x{n} matrix")

    def apply(self, T):
        A = np.array(T, dtype=float, copy=True)
        A[self.j, self.k] += self.sigma
        return A


def family_indices(family, index):
    """0-based (row, col) of the 1-based family member: A_jj, A_1k or A_j1."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if index < 1:
        raise DomainError("family index is 1-based")
    i = index - 1
    return {"jj": (i, i), "1k": (0, i), "j1": (i, 0)}[family]


def resolvent_entry(spec, lam, k, j, tol=1e-12):
    """[R(lam)]_{kj} = sum_m right_m[k] left_m[j] / (E_m - lam)."""
    d = spec.eigenvalues - lam
    scale = max(float(np.max(np.abs(spec.eigenvalues))), 1.0)
    m = int(np.argmin(np.abs(d)))
    if abs(d[m]) <= tol * scale:
        raise PoleError(f"lambda={lam} coincides with eigenvalue {m}")
    return complex(np.sum(spec.right[k, :] * spec.left[:, j] / d))


def rank1_root_check(spec, pert, eigenvalues, tol=1e-12):
    """|[R(lam)]_{kj} + 1/sigma| at each given perturbed eigenvalue.

    Eigenvalues shared with ``spec`` (poles of R) are reported as NaN.
    """
    if pert.sigma == 0:
        raise DomainError("sigma must be non-zero")
    pert.check(spec.n)
    out = np.empty(len(eigenvalues))
    for i, lam in enumerate(eigenvalues):
        try:
            out[i] = abs(resolvent_entry(spec, lam, pert.k, pert.j, tol) + 1.0 / pert.sigma)
        except PoleError:
            out[i] = np.nan
    return out


def correction_winding(corrections, tol=1e-9):
    """Winding of the closed polyline of corrections about its hull centroid."""
    z = np.asarray(corrections, dtype=complex)
    if len(z) < 8:
        raise DomainError("correction_winding needs at least 8 points")
    scale = float(np.max(np.abs(z - z.mean())))
    if scale == 0.0:
        raise OnCurveError("constant correction sequence: centroid lies on the curve")
    return polyline_winding(z, hull_centroid(z), tol=tol * scale)


def census_grid(sigma_max, points=64, start=1e-3):
    return np.concatenate([[0.0], np.geomspace(start, sigma_max, points)])


@dataclass
class RunawayCensus:
    family: str
    index: int
    n: int
    alpha: float
    beta: float
    sigma_max: float
    count_type_II: int
    count_real_collisions: int
    winding_of_E1: int
    inward: int
    outward: int
    per_runaway: list = field(default_factory=list)

    def to_json(self, path=None):
        d = asdict(self)
        if path is not None:
            with open(path, "w") as fh:
                json.dump(d, fh, indent=2, sort_keys=True)
        return d


def runaway_census(params, n, family, index, sigma_max=20.0, points=64, far_factor=5.0,
                   real_tol=1e-6, threads=None, return_trajectories=False):
    """Follow T + sigma A along the census grid and count runaways.

    A path is a runaway when its total displacement at sigma_max exceeds
    ``far_factor`` times the median displacement over all paths.  A runaway
    moves inward when its net displacement points toward the centroid of
    the unperturbed spectrum (positive projection on centroid - E0); the
    radial velocity averaged over the last quarter of the grid is stored as
    a second diagnostic.
    """
    row, col = family_indices(family, index)
    if family == "jj" and index >= n / 2:
        raise DomainError("A_jj census needs j < n/2")
    T = build_toeplitz(params, n).entries
    spec0 = sort_by_momentum(eig_full(T), params)
    grid = census_grid(sigma_max, points)

    def solve(s):
        return eig_full(RankOnePerturbation(row, col, s).apply(T))

    traj = track_adaptive(solve, grid, first=spec0, keep_spectra=False, threads=threads)
    E0, Eend = traj.paths[0], traj.paths[-1]
    disp = np.abs(Eend - E0)
    far = np.flatnonzero(disp > far_factor * np.median(disp))
    centre = hull_centroid(E0)
    diam = float(np.max(np.abs(E0[:, None] - E0[None, :])))
    eps = real_tol * diam
    collided = np.flatnonzero((np.abs(E0.imag) > eps) & (np.abs(Eend.imag) <= eps))
    tail = traj.sigma_grid >= traj.sigma_grid[0] + 0.75 * (traj.sigma_grid[-1] - traj.sigma_grid[0])
    tail_idx = np.flatnonzero(tail)
    if len(tail_idx) < 2:
        tail_idx = np.arange(len(traj.sigma_grid) - 2, len(traj.sigma_grid))
    per = []
    inward = 0
    for l in far:
        proj = float(((Eend[l] - E0[l]) * np.conj(centre - E0[l])).real)
        r = np.abs(traj.paths[tail_idx, l] - centre)
        radial = float((r[-1] - r[0]) / (traj.sigma_grid[tail_idx[-1]] - traj.sigma_grid[tail_idx[0]]))
        is_in = proj > 0
        inward += int(is_in)
        per.append({"path": int(l), "label": int(l) + 1,
                    "initial_re": float(E0[l].real), "initial_im": float(E0[l].imag),
                    "final_re": float(Eend[l].real), "final_im": float(Eend[l].imag),
                    "displacement": float(disp[l]), "kappa_max": float(traj.kappa[:, l].max()),
                    "inward": bool(is_in), "late_radial_velocity": radial})
    v = np.zeros(n)
    v[row] = 1.0  # first-order correction needs only the diagonal for jj
    if row == col:
        E1 = first_order(spec0, v)
    else:
        E1 = spec0.left[:, row] * spec0.right[col, :]
    census = RunawayCensus(family=family, index=int(index), n=int(n), alpha=params.alpha,
                           beta=params.beta, sigma_max=float(sigma_max), count_type_II=len(far),
                           count_real_collisions=len(collided), winding_of_E1=correction_winding(E1),
                           inward=inward, outward=len(far) - inward, per_runaway=per)
    if return_trajectories:
        return census, traj
    return census
