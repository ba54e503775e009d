"""Command-line experiment runner.

Every subcommand writes its data files plus ``manifest.json`` (parameters,
seed, version and a sha256 per file) into ``--output-dir``.  Settings come
from flags, then an optional JSON ``--config`` document, then defaults.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""

import argparse
from dataclasses import dataclass, asdict, field, fields
import hashlib
import json
import math
import os
import sys

import numpy as np

from fhspec import __version__
from fhspec.errors import DomainError, FHSpecError
from fhspec.symbol import SymbolParams, TWO_PI, symbol_curve, asymptotic_momentum
from fhspec.toeplitz import MAX_DIMENSION, build_toeplitz

EXPERIMENTS = ("build", "spectrum", "momenta", "sweep", "rank1", "freeprob", "localize")


@dataclass
class SigmaGridSpec:
    max: float = 0.5
    points: int = 51
    spacing: str = "linear"

    def values(self):
        if self.spacing == "linear":
            return np.linspace(0.0, self.max, self.points)
        if self.spacing == "geometric":
            return np.concatenate([[0.0], np.geomspace(1e-3, self.max, self.points)])
        raise DomainError(f"unknown spacing {self.spacing!r}")


@dataclass
class ExperimentConfig:
    experiment: str = "spectrum"
    alpha: float = 1.0 / 3.0
    beta: float = -0.5
    n: int = 160
    sigma_grid: SigmaGridSpec = field(default_factory=SigmaGridSpec)
    seed: int = 42
    thresholds: dict = field(default_factory=dict)
    trials: int = 50
    sigma: float = 1.0
    family: str = "jj"
    index: int = 1
    vectors: bool = False
    output_dir: str = "out"

    def params(self):
        return SymbolParams(self.alpha, self.beta)

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}")
        self.params()
        if not 2 <= self.n <= MAX_DIMENSION:
            raise DomainError(f"n={self.n} outside [2, {MAX_DIMENSION}]")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        g = self.sigma_grid
        if not (math.isfinite(g.max) and g.max >= 0) or g.points < 1:
            raise DomainError("sigma grid needs max >= 0 and points >= 1")
        if g.spacing not in ("linear", "geometric"):
            raise DomainError(f"unknown spacing {g.spacing!r}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise DomainError("sigma must be finite and non-negative")
        if self.experiment == "rank1":
            from fhspec.rank1 import family_indices
            family_indices(self.family, self.index)
            if self.index > self.n or (self.family == "jj" and self.index >= self.n / 2):
                raise DomainError(f"index {self.index} out of range for family {self.family} at n={self.n}")
            if g.max <= 1e-3:
                raise DomainError("rank1 census needs sigma-max > 1e-3")
        from fhspec.disorder import Thresholds
        unknown = set(self.thresholds) - {f.name for f in fields(Thresholds)}
        if unknown:
            raise DomainError(f"unknown thresholds {sorted(unknown)}")
        return self

    def to_dict(self):
        return asdict(self)


def load_config(args):
    """Merge defaults, JSON config file and explicit flags (highest priority)."""
    cfg = ExperimentConfig(experiment=args.experiment)
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise DomainError(f"cannot read config {args.config}: {exc}")
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
    grid = dict(asdict(cfg.sigma_grid))
    user_grid = data.pop("sigma_grid", {}) or {}
    grid.update(user_grid)
    data.pop("experiment", None)
    known = {f.name for f in fields(ExperimentConfig)}
    bad = set(data) - known
    if bad:
        raise DomainError(f"unknown config keys {sorted(bad)}")
    for k, v in data.items():
        setattr(cfg, k, v)
    flag_map = {"alpha": "alpha", "beta": "beta", "n": "n", "seed": "seed", "trials": "trials",
                "sigma": "sigma", "family": "family", "index": "index", "output_dir": "output_dir",
                "vectors": "vectors"}
    for flag, attr in flag_map.items():
        v = getattr(args, flag, None)
        if v is not None:
            setattr(cfg, attr, v)
    for flag, key in (("sigma_max", "max"), ("points", "points"), ("spacing", "spacing")):
        v = getattr(args, flag, None)
        if v is not None:
            grid[key] = v
    if cfg.experiment == "rank1" and getattr(args, "spacing", None) is None and "spacing" not in user_grid:
        grid["spacing"] = "geometric"
    cfg.sigma_grid = SigmaGridSpec(**grid)
    return cfg.validate()


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(cfg, files, extra=None):
    out = cfg.output_dir
    entries = [{"path": os.path.relpath(f, out), "sha256": _sha256(f)} for f in files]
    doc = {"tool": "fhspec", "version": __version__, "experiment": cfg.experiment,
           "config": cfg.to_dict(), "files": entries}
    if extra:
        doc.update(extra)
    path = os.path.join(out, "manifest.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    return path


def _out(cfg, name):
    return os.path.join(cfg.output_dir, name)


def run_build(cfg):
    T = build_toeplitz(cfg.params(), cfg.n)
    path = _out(cfg, "matrix.csv")
    T.to_csv(path)
    return [path, path + ".json"], {}


def _spectrum(cfg):
    from fhspec.spectral import eig_full, sort_by_momentum
    T = build_toeplitz(cfg.params(), cfg.n).entries
    return T, sort_by_momentum(eig_full(T), cfg.params())


def run_spectrum(cfg):
    _, spec = _spectrum(cfg)
    files = []
    path = _out(cfg, "spectrum.csv")
    spec.to_csv(path, vectors=cfg.vectors)
    files.append(path)
    if cfg.vectors:
        files.append(path + ".vec")
    curve = symbol_curve(cfg.params(), 1024)
    theta = TWO_PI * (np.arange(1024) + 0.5) / 1024
    path = _out(cfg, "symbol_curve.csv")
    with open(path, "w") as fh:
        fh.write("theta,re_a,im_a\n")
        for t, a in zip(theta, curve):
            fh.write(f"{t:.17g},{a.real:.17g},{a.imag:.17g}\n")
    files.append(path)
    return files, {"kappa_max": spec.kappa_max}


def run_momenta(cfg):
    _, spec = _spectrum(cfg)
    p = spec.momenta
    path = _out(cfg, "momenta.csv")
    with open(path, "w") as fh:
        fh.write("label,re_p,im_p,re_dp,im_dp,re_p_asym,im_p_asym\n")
        for i in range(spec.n):
            dp = p[i + 1] - p[i] if i + 1 < spec.n else complex("nan")
            pa = asymptotic_momentum(spec.n, i + 1, cfg.params()).p
            fh.write(f"{i + 1}," + ",".join(f"{x:.17g}" for x in
                                           (p[i].real, p[i].imag, dp.real, dp.imag, pa.real, pa.imag)) + "\n")
    return [path], {}


def _sweep(cfg):
    from fhspec.disorder import Thresholds, classify_eigenpairs, sigma_sweep
    grid = cfg.sigma_grid.values()
    sw = sigma_sweep(cfg.params(), cfg.n, sigma_grid=grid, seed=cfg.seed)
    classify_eigenpairs(sw, Thresholds(**cfg.thresholds))
    return sw


def run_sweep(cfg):
    sw = _sweep(cfg)
    files = sw.export(cfg.output_dir)
    return files, {"counts": sw.counts()}


def run_rank1(cfg):
    from fhspec.rank1 import runaway_census
    g = cfg.sigma_grid
    census, traj = runaway_census(cfg.params(), cfg.n, cfg.family, cfg.index, sigma_max=g.max,
                                  points=g.points, return_trajectories=True)
    path = _out(cfg, "census.json")
    census.to_json(path)
    tpath = _out(cfg, "trajectories.csv")
    traj.to_csv(tpath)
    return [path, tpath], {"count_type_II": census.count_type_II, "winding_of_E1": census.winding_of_E1}


def run_freeprob(cfg):
    from fhspec.freeprob import compare_dos
    T, spec = _spectrum(cfg)
    cmp = compare_dos(T, spec, cfg.sigma, cfg.trials, cfg.seed)
    return cmp.export(cfg.output_dir), {"distances": cmp.distances}


def run_localize(cfg):
    from fhspec.disorder import archetypes
    from fhspec.localization import profiles, profiles_to_csv
    sw = _sweep(cfg)
    traj = sw.trajectories
    files = []
    for k, tag in ((0, "initial"), (len(traj.sigma_grid) - 1, "final")):
        path = _out(cfg, f"profiles_{tag}.csv")
        profiles_to_csv(path, profiles(traj.right_vectors(k)))
        files.append(path)
    arch = archetypes(sw)
    final = profiles(traj.right_vectors(len(traj.sigma_grid) - 1))
    summary = {c: (None if l is None else {"path": int(l), **final[l].to_dict()}) for c, l in arch.items()}
    path = _out(cfg, "archetypes.json")
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    files.append(path)
    return files, {"counts": sw.counts()}


RUNNERS = {"build": run_build, "spectrum": run_spectrum, "momenta": run_momenta, "sweep": run_sweep,
           "rank1": run_rank1, "freeprob": run_freeprob, "localize": run_localize}


def run(cfg):
    """Execute one validated configuration; returns the manifest path."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    files, extra = RUNNERS[cfg.experiment](cfg)
    return write_manifest(cfg, files, {"summary": extra})


def build_parser():
    parser = argparse.ArgumentParser(prog="fhspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fhspec {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--output-dir", dest="output_dir")
        if name in ("sweep", "rank1", "localize"):
            p.add_argument("--sigma-max", dest="sigma_max", type=float)
            p.add_argument("--points", type=int)
            p.add_argument("--spacing", choices=("linear", "geometric"))
        if name == "spectrum":
            p.add_argument("--vectors", action="store_true", default=None,
                           help="also write the eigenvector binary sidecar")
        if name == "freeprob":
            p.add_argument("--sigma", type=float)
            p.add_argument("--trials", type=int)
        if name == "rank1":
            p.add_argument("--family", choices=("jj", "1k", "j1"))
            p.add_argument("--index", type=int)
    return parser


def _fail(code, exc):
    line = {"status": "error", "exit_code": code, "type": type(exc).__name__, "reason": str(exc)}
    print(json.dumps(line, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args)
    except (FHSpecError, TypeError, ValueError) as exc:
        return _fail(2, exc)
    try:
        manifest = run(cfg)
    except DomainError as exc:
        return _fail(2, exc)
    except FHSpecError as exc:
        return _fail(exc.exit_code, exc)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(3, exc)
    except OSError as exc:
        return _fail(2, exc)
    print(json.dumps({"status": "ok", "manifest": manifest}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
