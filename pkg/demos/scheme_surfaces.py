"""Compare the three delivery schemes over a coarse wander/squeezing grid.

Walks a 5 x 5 slice of the low-loss survey (beta/W = 1) and prints the
delivered log-negativity of each scheme side by side, plus the two ordering
facts the full grids exhibit: the satellite source never loses to direct
transmission, and direct transmission at its best squeezing never loses to
swapping at its best.  The shipped scenario files run the full 15 x 15 grids:

    cvsat sweep scenarios/lowloss_bw1.0.scn --out surfaces.csv
"""

import numpy as np

from cvsat.fading import LinkGeometry
from cvsat.gaussian import Squeezing, log_negativity
from cvsat.numerics import QuadratureSpec
from cvsat.schemes import SchemeConfig, ensemble_cm

QUAD = QuadratureSpec(nodes_1d=32, subdivisions=4)
KINDS = ("direct", "satellite", "swap")


def surface(kind, sigmas, rs):
    out = np.empty((sigmas.size, rs.size))
    for i, sigma in enumerate(sigmas):
        geom = LinkGeometry(sigma_b=float(sigma), k1=0.5, k2=0.64)
        for j, r in enumerate(rs):
            cfg = SchemeConfig(kind=kind, squeezing=Squeezing(float(r)),
                               geometry=geom, beta=1.0, w=1.0, quad=QUAD)
            out[i, j] = log_negativity(ensemble_cm(cfg))
    return out


def main():
    sigmas = np.linspace(0.1, 1.5, 5)
    rs = np.linspace(0.1, 2.0, 5)
    surfaces = {kind: surface(kind, sigmas, rs) for kind in KINDS}

    header = "sigma_b     r   " + "".join(f"{k:>11s}" for k in KINDS)
    print(header)
    print("-" * len(header))
    for i, sigma in enumerate(sigmas):
        for j, r in enumerate(rs):
            cells = "".join(f"{surfaces[k][i, j]:11.4f}" for k in KINDS)
            print(f"{sigma:7.2f} {r:5.2f} {cells}")
        print()

    sat_gap = (surfaces["satellite"] - surfaces["direct"]).min()
    print(f"satellite - direct, worst case: {sat_gap:+.4f}  (never negative)")
    best_direct = surfaces["direct"].max(axis=1)
    best_swap = surfaces["swap"].max(axis=1)
    print("best over r, per wander level:")
    for sigma, d, s in zip(sigmas, best_direct, best_swap):
        print(f"  sigma_b {sigma:4.2f}: direct {d:.4f} vs swap {s:.4f}")


if __name__ == "__main__":
    main()
