"""Write the CSV data behind the four LMG figure presets into an output directory.

    python scripts/figure_data.py --outdir data/
"""

import argparse
import pathlib

from fidelity_lie.sweep import SweepConfig, run_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="data")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in ("fig1", "fig2", "fig3", "fig4"):
        path = outdir / f"lmg_{name}.csv"
        _, summary = run_sweep(SweepConfig.from_preset(name, output_path=str(path), workers=args.workers))
        print(f"{name}: {summary['rows']} rows, max chi {summary['max_chi_closed']:.4g} -> {path}")


if __name__ == "__main__":
    main()
