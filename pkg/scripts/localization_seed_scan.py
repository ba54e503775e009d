"""How often does IPR(RunawayII) > IPR(Bulk) > IPR(RunawayI) hold across
disorder seeds?  Evaluated on the final grid point of each sweep."""
import argparse

from fhspec import WORKING_PARAMS
from fhspec.disorder import BULK, RUNAWAY_I, RUNAWAY_II, archetypes, classify_eigenpairs, sigma_sweep, standard_grid
from fhspec.localization import decay_profile, ipr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=160)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--sigma-max", type=float, default=0.5)
    ap.add_argument("--points", type=int, default=51)
    args = ap.parse_args()

    hits = 0
    for seed in range(args.seeds):
        sw = sigma_sweep(WORKING_PARAMS, args.n, sigma_grid=standard_grid(args.sigma_max, args.points),
                         seed=seed, keep_spectra=True)
        classify_eigenpairs(sw)
        arch = archetypes(sw)
        if None in arch.values():
            print(f"seed {seed:>3}: missing class {[k for k, v in arch.items() if v is None]}")
            continue
        R = sw.trajectories.right_vectors(len(sw.sigma_grid) - 1)
        P = {k: ipr(R[:, l]) for k, l in arch.items()}
        ok = P[RUNAWAY_II] > P[BULK] > P[RUNAWAY_I]
        hits += ok
        cls = decay_profile(R[:, arch[RUNAWAY_I]]).decay_class
        print(f"seed {seed:>3}: II {P[RUNAWAY_II]:.3f} Bulk {P[BULK]:.3f} I {P[RUNAWAY_I]:.3f} "
              f"ordered={ok} I-class={cls}")
    print(f"ordering held for {hits}/{args.seeds} seeds ({100 * hits / args.seeds:.0f}%)")


if __name__ == "__main__":
    main()
