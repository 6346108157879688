# Entanglement transfer after pulsed ionization: electron-ion first, then
# electron-(photon number) as the excited ion fluoresces away.
#
# Runs the trace driver at reduced grid resolution by default (~15 s);
# pass --full for the resolution used by the data files.

import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ionent.config import default_config, with_grids
from ionent.experiments import run_transfer_trace, series_crossing
from ionent.units import EnergyGrid, au_to_fs


def reduced(config):
    eps = EnergyGrid(config.eps_grid.e_min, config.eps_grid.e_max, 121)
    epsl = EnergyGrid(config.epsl_grid.e_min, config.epsl_grid.e_max, 121)
    return with_grids(config, eps_grid=eps, epsl_grid=epsl)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=".", help="directory for the png")
    ap.add_argument("--full", action="store_true", help="full grid resolution")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    config = default_config()
    if not args.full:
        config = reduced(config)
    trace = run_transfer_trace(config, n_tau=16, n_checkpoints=40)

    pulse = [p for p in trace.points if p.segment == "pulse"]
    decay = [p for p in trace.points if p.segment == "decay"]

    print("pulse-duration scan (entropy at each pulse's own end):")
    print("  tau_fs   S_AB    S_AC    P_ground")
    for p in pulse:
        print(f"  {au_to_fs(p.tau):6.1f}  {p.entropies['AB']:.4f}  "
              f"{p.entropies['AC']:.4f}  {p.populations.p_ground:.4f}")

    t = np.array([p.time for p in decay])
    s_ab = np.array([p.entropies["AB"] for p in decay])
    s_ac = np.array([p.entropies["AC"] for p in decay])
    cross = series_crossing(t, s_ab, s_ac)
    if cross is not None:
        print(f"\nhandover: S_AB meets S_AC at t = {au_to_fs(cross[0]):,.0f} fs, "
              f"S = {cross[1]:.3f} bits")
    half_life_fs = au_to_fs(np.log(2.0) / config.physical.kappa)
    print(f"fluorescence half-life ln2/kappa = {half_life_fs:,.0f} fs")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 3.6))
    ax1.plot([au_to_fs(p.tau) for p in pulse], [p.entropies["AB"] for p in pulse],
             "o-", label=r"$S_{AB}$ (electron-ion)")
    ax1.plot([au_to_fs(p.tau) for p in pulse], [p.entropies["AC"] for p in pulse],
             "s-", label=r"$S_{AC}$ (electron-photon\#)")
    ax1.set_xlabel("pulse duration (fs)")
    ax1.set_ylabel("entropy (bits)")
    ax1.set_title("at pulse end")
    ax1.legend()

    t_fs = np.array([au_to_fs(p.time) for p in decay]) / 1e3
    ax2.plot(t_fs, s_ab, label=r"$S_{AB}$")
    ax2.plot(t_fs, s_ac, label=r"$S_{AC}$")
    ax2.plot(t_fs, [p.populations.p_beta for p in decay], "--", label=r"$P_\beta$")
    ax2.plot(t_fs, [p.populations.p_gamma for p in decay], "--", label=r"$P_\gamma$")
    ax2.set_xlabel("time (ps)")
    ax2.set_title("during fluorescence decay")
    ax2.legend()
    fig.tight_layout()
    path = os.path.join(args.out, "transfer_trace.png")
    fig.savefig(path, dpi=150)
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
