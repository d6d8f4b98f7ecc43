"""Analytic power moments across base-station density, checked by simulation.

For each association scheme (nearest transmitter, two nearest, fixed
cooperative circle, power-threshold set) the script evaluates the
closed-form mean and variance of the desired and interference power on a
grid of densities, runs the annulus simulator at each density, and prints
both side by side with the simulator's standard errors.

Output: two tables on stdout and demos/out/density_sweep.png
"""

import os

import matplotlib.pyplot as plt
import numpy as np

from udnjt import moments, montecarlo
from udnjt.model import AggregateKind, ChannelModel, NetworkParams, Scheme

# ---- parameters ----

LAMBDA_GRID = (1e-3, 2.5e-3, 5e-3, 7.5e-3, 1e-2)  # base stations / m^2
P_S_MW = 10.0 ** 1.7        # 17 dBm transmit power
R_L, R_M = 0.1, 60.0        # annulus radii (m)
ALPHA = 3.5                 # path-loss exponent
N_TRIALS = 20000
SEED = 3

SCHEMES = (Scheme.nojt(), Scheme.two_ns(), Scheme.cd(3.0), Scheme.fpd(10.0))
CHANNEL = ChannelModel.rayleigh()


def params_at(lam):
    return NetworkParams(lambda_b=lam, r_l=R_L, r_m=R_M, k_s=1.0,
                         alpha_s=ALPHA, p_s=P_S_MW, n_0=0.0)


def main():
    kinds = (AggregateKind.DESIRED, AggregateKind.INTERFERENCE)
    rows = {(s, k): ([], [], []) for s in SCHEMES for k in kinds}

    for lam in LAMBDA_GRID:
        p = params_at(lam)
        res = montecarlo.run_experiment(p, SCHEMES, CHANNEL, N_TRIALS,
                                        seed=SEED)
        for s in SCHEMES:
            for kind in kinds:
                cell = res[(s, kind.value)]
                an, mc, se = rows[(s, kind)]
                an.append(moments.mean_power(p, s, CHANNEL, kind))
                mc.append(cell.mean)
                se.append(cell.standard_error)

    # ---- mean table ----
    print(f"mean power (mW), rayleigh fading, {N_TRIALS} trials per density")
    print(f"{'scheme':>6} {'side':>12} " +
          " ".join(f"{lam:>9.2g}" for lam in LAMBDA_GRID))
    for s in SCHEMES:
        for kind in kinds:
            an, mc, se = rows[(s, kind)]
            print(f"{s.key:>6} {kind.value:>12} " +
                  " ".join(f"{v:>9.3g}" for v in an))
            print(f"{'':>6} {'(simulated)':>12} " +
                  " ".join(f"{v:>9.3g}" for v in mc))

    # ---- variance spot check at the densest point ----
    p = params_at(LAMBDA_GRID[-1])
    res = montecarlo.run_experiment(p, SCHEMES, CHANNEL, N_TRIALS, seed=SEED)
    print(f"\nvariance at lambda_b = {LAMBDA_GRID[-1]:g} (analytic | simulated)")
    for s in SCHEMES:
        cell = res[(s, "desired")]
        an = moments.variance_power(p, s, CHANNEL, AggregateKind.DESIRED)
        print(f"{s.key:>6} desired      {an:>11.4g} | {cell.variance:>11.4g}"
              f"  (se {cell.variance_standard_error:.2g})")

    # ---- figure ----
    os.makedirs("demos/out", exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
    for ax, kind in zip(axes, kinds):
        for s in SCHEMES:
            an, mc, se = rows[(s, kind)]
            line, = ax.plot(LAMBDA_GRID, an, label=s.key)
            ax.errorbar(LAMBDA_GRID, mc, yerr=3 * np.asarray(se), fmt="x",
                        color=line.get_color())
        ax.set_xlabel("base station density (1/m^2)")
        ax.set_ylabel(f"mean {kind.value} power (mW)")
        ax.set_xscale("log")
        ax.set_yscale("log")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig("demos/out/density_sweep.png", dpi=120)
    print("\nwrote demos/out/density_sweep.png")


if __name__ == "__main__":
    main()
