"""Deviation tables for the alpha -> 0 maps, all three variants, over a finer alpha ladder."""

import sys

from qes import transforms as tr
from qes.params import make_params

ALPHAS = (0.08, 0.04, 0.02, 0.01, 0.005)


def main(alphas=ALPHAS):
    targets = [(tr.coulomb_limit_map, make_params("coulomb", "1/2", q=1, ell=0, a=2, root=-2)),
               (tr.oscillator_limit_map, make_params("oscillator", 0, q=1, ell=2, a=2, root=-3))]
    for make, target in targets:
        for variant in tr.MAP_VARIANTS:
            rec = tr.limit_convergence_scan(make(target, variant), alphas=alphas)
            print(f"{rec.map_name} [{variant}] converged={rec.converged}")
            for a, d, o in rec.rows():
                print(f"  alpha={a:<7g} deviation={d:.6e} order={'' if o is None else f'{o:.4f}'}")


if __name__ == "__main__":
    main(tuple(float(a) for a in sys.argv[1:]) or ALPHAS)
