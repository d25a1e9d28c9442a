"""Shock tube on D2V33 and D2V37 against the exact Riemann solution.

Writes one profile CSV per output time for each lattice and prints the
plateau errors plus the cross-lattice L2 gap.
"""
import argparse
from dataclasses import replace

from lbm33.cli import load_config
from lbm33.fileio import write_profile
from lbm33.lattice import get_lattice
from lbm33.scenarios import plateau_report, relative_l2_physical, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/shock_tube.conf")
    ap.add_argument("--steps", type=int, help="override the step count")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.steps is not None:
        cfg = replace(cfg, steps=args.steps)
    finals = {}
    for name in ("d2v33", "d2v37"):
        lat = get_lattice(name)
        run_cfg = replace(cfg, lattice_name=name, output_prefix=f"{cfg.output_prefix}_{name}")
        for rec in run(run_cfg, lat):
            write_profile(rec, f"{run_cfg.output_prefix}_step{rec.step:06d}.csv")
            if rec.step == 0:
                continue
            try:
                rep = plateau_report(rec.profile["rho_total"], cfg, rec.step, lat.c)
            except ValueError:
                continue
            print(f"{name} step {rec.step:4d}: plateau err {rep.left_error:.2%} / {rep.right_error:.2%}"
                  f"  levels {rep.level_left:+.3%} / {rep.level_right:+.3%}  rebound {rep.rebound:.1e}")
            finals[name] = (rec.profile["rho_total"], lat.c)
    (ra, ca), (rb, cb) = finals["d2v33"], finals["d2v37"]
    print(f"D2V33 vs D2V37 relative L2: {relative_l2_physical(ra, ca, rb, cb, cfg.nx, cfg.nx):.3e}")


if __name__ == "__main__":
    main()
