"""Kolmogorov distances of the free and classical DOS models to the exact
disordered ensemble, for a list of sigma values."""
import argparse

from fhspec import WORKING_PARAMS
from fhspec.spectral import eig_full, sort_by_momentum
from fhspec.toeplitz import build_toeplitz
from fhspec.freeprob import compare_dos


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=160)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.1, 0.3, 1.0, 3.0])
    ap.add_argument("--out", help="export histograms for each sigma under this directory")
    args = ap.parse_args()

    T = build_toeplitz(WORKING_PARAMS, args.n).entries
    spec = sort_by_momentum(eig_full(T), WORKING_PARAMS)
    print(f"{'sigma':>6} {'free_Re':>8} {'class_Re':>8} {'free_Im':>8} {'class_Im':>8}")
    for s in args.sigmas:
        cmp = compare_dos(T, spec, s, args.trials, args.seed)
        d = cmp.distances
        print(f"{s:>6.2f} {d['free_Re']:>8.4f} {d['classical_Re']:>8.4f} {d['free_Im']:>8.4f} {d['classical_Im']:>8.4f}")
        if args.out:
            cmp.export(f"{args.out}/sigma_{s:g}")


if __name__ == "__main__":
    main()
