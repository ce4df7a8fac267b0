"""Switch Index sweep on map C for the default set and one-knob variants.

    python scripts/si_sweep.py [--seeds 20] [--variants default PN=750 BRF=30 ST=40 PT=20]
"""

import argparse
from pathlib import Path

from crowdsim.config import config_from_dict
from crowdsim.experiment import point_means, run_experiment
from crowdsim.report import write_report

SI_VALUES = [10, 20, 30, 40]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--variants", nargs="+", default=["default", "PN=750", "BRF=30", "ST=40", "PT=20"])
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    Path(args.outdir).mkdir(parents=True, exist_ok=True)

    for variant in args.variants:
        d = {"schema_version": 1, "mode": "stage", "map": "C", "seed_mode": "shared",
             "seeds": list(range(1, args.seeds + 1)), "grid": {"SI": SI_VALUES},
             "workers": args.workers}
        if variant != "default":
            knob, value = variant.split("=")
            d[knob] = int(value)
        rows = run_experiment(config_from_dict(d))
        out = Path(args.outdir) / f"si_{variant.replace('=', '').lower()}.csv"
        write_report(rows, out)
        F = [point_means(rows, "F", SI=si) for si in SI_VALUES]
        APS = [point_means(rows, "APS", SI=si) for si in SI_VALUES]
        mono = (all(a >= b for a, b in zip(F, F[1:])) and all(a <= b for a, b in zip(APS, APS[1:])))
        print(f"{variant:8} F " + " ".join(f"{f:.5f}" for f in F)
              + "  APS " + " ".join(f"{a:6.3f}" for a in APS)
              + ("  monotone" if mono else "  NOT monotone"))


if __name__ == "__main__":
    main()
