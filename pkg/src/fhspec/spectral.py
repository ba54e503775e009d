"""Eigenpairs of dense non-Hermitian matrices and their tracking across sigma."""

from dataclasses import dataclass, field, replace
import json
import math
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from fhspec.errors import (ConvergenceError, DegeneracyError, GridTooCoarseError,
                           IllPosedBasisError)
from fhspec.symbol import TWO_PI, eval_symbol_array, invert_symbol

DEGENERACY_TOL = 1e-12
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition T = Psi diag(E) Psi^{-1}.

    ``right[:, l]`` is the unit-norm right eigenvector of ``eigenvalues[l]``
    and ``left[l, :]`` the matching row of Psi^{-1}, so that
    ``left @ right = I``.  Once momenta are attached (``sort_by_momentum``)
    every array is stored in momentum order.
    """

    n: int
    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    basis_condition: float = 1.0
    min_gap: float = math.inf
    matrix_norm: float = 0.0
    momenta: Optional[np.ndarray] = field(default=None, repr=False)
    order: Optional[np.ndarray] = field(default=None, repr=False)

    def take(self, perm):
        perm = np.asarray(perm)
        return replace(
            self,
            eigenvalues=self.eigenvalues[perm],
            right=self.right[:, perm],
            left=self.left[perm, :],
            c=self.c[perm],
            kappa=self.kappa[perm],
            momenta=None if self.momenta is None else self.momenta[perm],
        )

    @property
    def kappa_max(self):
        return float(self.kappa.max())

    def biorthogonality_residual(self):
        G = self.left @ self.right
        return float(np.max(np.abs(G - np.eye(self.n))))

    def residuals(self, matrix):
        """(max right residual, max left residual / ||left||) in 2-norm."""
        A = np.asarray(matrix)
        r = np.linalg.norm(A @ self.right - self.right * self.eigenvalues, axis=0)
        lres = np.linalg.norm(self.left @ A - self.eigenvalues[:, None] * self.left, axis=1)
        return float(r.max()), float(np.max(lres / np.linalg.norm(self.left, axis=1)))

    def to_csv(self, path, vectors=False):
        mom = self.momenta if self.momenta is not None else np.full(self.n, np.nan + 0j)
        with open(path, "w") as fh:
            fh.write("order_index,re_E,im_E,re_p,im_p,kappa,abs_c\n")
            for i in range(self.n):
                E, p = self.eigenvalues[i], mom[i]
                vals = (E.real, E.imag, p.real, p.imag, self.kappa[i], abs(self.c[i]))
                fh.write(f"{i}," + ",".join(f"{v:.17g}" for v in vals) + "\n")
        if vectors:
            write_vectors(str(path) + ".vec", self.right, self.left)


def write_vectors(path, right, left):
    """Binary sidecar: JSON header line, then right then left matrices as
    row-major little-endian float64 with interleaved Re/Im."""
    header = {"n": int(right.shape[0]), "blocks": ["right", "left"], "dtype": "<f8",
              "layout": "row-major interleaved re/im"}
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        for M in (right, left):
            fh.write(np.ascontiguousarray(M, dtype="<c16").tobytes())


def read_vectors(path):
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        n = header["n"]
        data = np.frombuffer(fh.read(), dtype="<c16")
    return data[: n * n].reshape(n, n), data[n * n:].reshape(n, n)


def _min_gap(E):
    """Smallest pairwise eigenvalue distance and the pair attaining it."""
    n = len(E)
    if n < 2:
        return math.inf, None
    if n <= 2048:
        D = np.abs(E[:, None] - E[None, :])
        np.fill_diagonal(D, np.inf)
        k = int(np.argmin(D))
        return float(D.flat[k]), divmod(k, n)
    best, pair = math.inf, None
    for i in range(n - 1):
        d = np.abs(E[i + 1:] - E[i])
        j = int(np.argmin(d))
        if d[j] < best:
            best, pair = float(d[j]), (i, i + 1 + j)
    return best, pair


def eig_full(matrix, degeneracy_tol=DEGENERACY_TOL, condition_limit=CONDITION_LIMIT):
    """Right eigenvectors from LAPACK, left eigenvectors as rows of Psi^{-1}."""
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("eig_full needs a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    norm = float(np.linalg.norm(A, 2))
    E, R = sla.eig(A, check_finite=False)
    gap, pair = _min_gap(E)
    if gap <= degeneracy_tol * max(norm, 1e-300):
        raise DegeneracyError(f"numerically multiple eigenvalue: gap {gap:.3e} between {pair}",
                              gap=gap, pair=pair)
    R = R / np.linalg.norm(R, axis=0)
    cond = float(np.linalg.cond(R))
    if not np.isfinite(cond) or cond > condition_limit:
        raise IllPosedBasisError(f"eigenvector basis condition {cond:.3e} exceeds {condition_limit:.0e}",
                                 condition=cond)
    L = sla.solve(R, np.eye(n, dtype=R.dtype), check_finite=False)
    kappa = np.maximum(np.linalg.norm(L, axis=1), 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = 1.0 / np.sum(R[::-1, :] * R, axis=0)
    return Spectrum(n=n, eigenvalues=E, right=R, left=L, c=c, kappa=kappa,
                    basis_condition=cond, min_gap=gap, matrix_norm=norm)


def condition_numbers(spec):
    """kappa = ||left|| ||right|| / |<left, right>|, which is ||left|| here."""
    num = np.linalg.norm(spec.left, axis=1) * np.linalg.norm(spec.right, axis=0)
    den = np.abs(np.einsum("ij,ji->i", spec.left, spec.right))
    return num / den


def _seed_grid(params, n):
    ell = np.arange(n + 1)
    p = TWO_PI * ell / n + 1j * (2 * params.alpha + 1) * math.log(n) / n
    p[0] += 1e-3
    p[-1] -= 1e-3
    return p, eval_symbol_array(params, p)


def compute_momenta(spec, params):
    """Invert the symbol at every eigenvalue, seeding Newton from the nearest
    point of the asymptotic momentum grid."""
    grid_p, grid_E = _seed_grid(params, spec.n)
    out = np.empty(spec.n, dtype=complex)
    for i, E in enumerate(spec.eigenvalues):
        k = np.argsort(np.abs(grid_E - E))[:3]
        err = None
        for seed in grid_p[k]:
            try:
                out[i] = invert_symbol(params, E, seed).p
                break
            except ConvergenceError as exc:
                err = exc
        else:
            raise ConvergenceError(f"momentum inversion failed for eigenvalue index {i} (E={E})",
                                   residual=err.residual, index=i)
    return out


def order_by_momentum(spec, params):
    """Permutation sorting the eigenvalues by Re p ascending."""
    p = spec.momenta if spec.momenta is not None else compute_momenta(spec, params)
    return np.lexsort((p.imag, p.real))


def sort_by_momentum(spec, params):
    """Spectrum re-stored in momentum order, with momenta attached."""
    p = compute_momenta(spec, params)
    perm = np.lexsort((p.imag, p.real))
    out = replace(spec, momenta=p).take(perm)
    return replace(out, order=perm)


@dataclass
class TrajectorySet:
    """Eigenvalue paths E^l(sigma_k); path l is labelled by its index at sigma_0.

    ``perms[k]`` maps path index to eigen-index in ``spectra[k]``.
    """

    sigma_grid: np.ndarray
    paths: np.ndarray
    kappa: np.ndarray
    perms: list
    spectra: Optional[list] = None
    ambiguities: list = field(default_factory=list)

    @property
    def n(self):
        return self.paths.shape[1]

    def spectrum_at(self, k):
        """Spectrum at grid point k re-indexed by path label (needs spectra)."""
        if self.spectra is None:
            raise ValueError("trajectory set was built without keeping spectra")
        return self.spectra[k].take(self.perms[k])

    def right_vectors(self, k):
        return self.spectra[k].right[:, self.perms[k]]

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("sigma,path,re_E,im_E,kappa\n")
            for k, s in enumerate(self.sigma_grid):
                for l in range(self.n):
                    E = self.paths[k, l]
                    fh.write(f"{s:.17g},{l},{E.real:.17g},{E.imag:.17g},{self.kappa[k, l]:.17g}\n")


def _overlap(Ra, Rb, a, b):
    return abs(np.vdot(Ra[:, a], Rb[:, b]))


def match_levels(prev, cur, ambiguity=0.1, conj_tol=1e-8, sigma=None):
    """Bijection prev-index -> cur-index minimising sum |E_a - E_b|^2.

    Each assignment is tested against swapping targets with the row that
    owns its nearest competing column.  When the swap is within
    ``ambiguity`` of the optimum in summed distance, eigenvector overlap
    decides; when overlap is equally indecisive the swap is accepted only if
    the two rows are conjugate partners (interchangeable for labelling) and
    otherwise a GridTooCoarseError is raised.
    """
    Ea, Eb = prev.eigenvalues, cur.eigenvalues
    D = np.abs(Ea[:, None] - Eb[None, :])
    rows, cols = linear_sum_assignment(D ** 2)
    assign = np.empty(len(Ea), dtype=int)
    assign[rows] = cols
    owner = np.empty(len(Ea), dtype=int)
    owner[cols] = rows
    scale = max(float(np.max(np.abs(Ea))), 1.0)
    notes = []
    for a in range(len(Ea)):
        b1 = assign[a]
        d = D[a].copy()
        d[b1] = np.inf
        b2 = int(np.argmin(d))
        a2 = owner[b2]
        cur_cost = D[a, b1] + D[a2, b2]
        swap_cost = D[a, b2] + D[a2, b1]
        if swap_cost <= 1e-14 * scale or swap_cost > (1 + ambiguity) * cur_cost:
            continue
        ov_cur = _overlap(prev.right, cur.right, a, b1) + _overlap(prev.right, cur.right, a2, b2)
        ov_swap = _overlap(prev.right, cur.right, a, b2) + _overlap(prev.right, cur.right, a2, b1)
        if ov_swap > (1 + ambiguity) * ov_cur:
            assign[a], assign[a2] = b2, b1
            owner[b1], owner[b2] = a2, a
            notes.append(("overlap-swap", a, a2))
        elif ov_cur > (1 + ambiguity) * ov_swap:
            continue
        elif abs(Ea[a] - np.conj(Ea[a2])) <= conj_tol * scale or abs(Eb[b1] - np.conj(Eb[b2])) <= conj_tol * scale:
            notes.append(("conjugate-pair", a, a2))
        else:
            raise GridTooCoarseError(
                f"ambiguous eigenvalue matching at sigma={sigma}: rows {a},{a2}", sigma=sigma)
    return assign, notes


def track_trajectories(spectra, sigma_grid, keep_spectra=True, ambiguity=0.1):
    """Chain consecutive bijective matchings into paths.

    ``spectra[0]`` defines the path labels (path l starts at its eigen-index
    l, so a momentum-sorted first spectrum yields momentum labels).
    """
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    if len(spectra) != len(sigma_grid):
        raise ValueError("one spectrum per grid point required")
    if np.any(np.diff(sigma_grid) <= 0):
        raise ValueError("sigma grid must be strictly ascending")
    n = spectra[0].n
    K = len(spectra)
    paths = np.empty((K, n), dtype=complex)
    kap = np.empty((K, n))
    perm = np.arange(n)
    perms = [perm]
    notes = []
    paths[0], kap[0] = spectra[0].eigenvalues, spectra[0].kappa
    for k in range(1, K):
        step, nk = match_levels(spectra[k - 1], spectra[k], ambiguity=ambiguity, sigma=sigma_grid[k])
        notes.extend((float(sigma_grid[k]),) + t for t in nk)
        perm = step[perm]
        perms.append(perm)
        paths[k] = spectra[k].eigenvalues[perm]
        kap[k] = spectra[k].kappa[perm]
    return TrajectorySet(sigma_grid=sigma_grid, paths=paths, kappa=kap, perms=perms,
                         spectra=list(spectra) if keep_spectra else None, ambiguities=notes)


def _solve_near(solve, sigma, nudge=1e-7):
    """solve(sigma); on a degenerate or ill-posed basis retry at sigma*(1 +/- nudge)."""
    from fhspec.errors import FHSpecError
    try:
        return sigma, solve(sigma)
    except (DegeneracyError, IllPosedBasisError) as exc:
        last = exc
    for s in (sigma * (1 + nudge), sigma * (1 - nudge), sigma + nudge, sigma * (1 + 10 * nudge)):
        try:
            return s, solve(s)
        except FHSpecError as exc:
            last = exc
    raise last


def track_adaptive(solve, sigma_grid, first=None, max_refine=6, keep_spectra=True, threads=None):
    """Decompose ``solve(sigma)`` on a grid and track, refining where matching is ambiguous.

    ``first`` optionally supplies the (e.g. momentum-sorted) spectrum at
    sigma_grid[0].  When the matching between two neighbours is ambiguous the
    interval is bisected, up to ``max_refine`` times per interval.  Grid
    points whose decomposition is degenerate are nudged by a relative 1e-7;
    the substitutions are recorded in ``ambiguities``.
    """
    from fhspec.rng import pmap

    grid = [float(s) for s in sigma_grid]
    todo = grid[1:] if first is not None else grid
    solved = pmap(lambda s: _solve_near(solve, s), todo, threads=threads)
    if first is not None:
        solved = [(grid[0], first)] + solved
    notes = [("nudged", s, t) for s, (t, _) in zip(grid, solved) if t != s]
    sig = [t for t, _ in solved]
    specs = [sp for _, sp in solved]
    n = specs[0].n
    perm = np.arange(n)
    perms = [perm]
    depth = [0] * len(sig)
    k = 1
    while k < len(sig):
        try:
            step, nk = match_levels(specs[k - 1], specs[k], sigma=sig[k])
        except GridTooCoarseError:
            if depth[k] >= max_refine:
                raise
            mid = 0.5 * (sig[k - 1] + sig[k])
            t, sp = _solve_near(solve, mid)
            sig.insert(k, t)
            specs.insert(k, sp)
            depth.insert(k, depth[k] + 1)
            depth[k + 1] += 1
            notes.append(("refined", mid))
            continue
        notes.extend((sig[k],) + t for t in nk)
        perm = step[perm]
        perms.append(perm)
        k += 1
    paths = np.array([sp.eigenvalues[p] for sp, p in zip(specs, perms)])
    kap = np.array([sp.kappa[p] for sp, p in zip(specs, perms)])
    return TrajectorySet(sigma_grid=np.array(sig), paths=paths, kappa=kap, perms=perms,
                         spectra=specs if keep_spectra else None, ambiguities=notes)
