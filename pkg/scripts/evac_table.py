"""Strategy x scenario table of evacuation metrics (ensemble means).

    python scripts/evac_table.py [--seeds 10] [--out results/evac_table.csv]
"""

import argparse
from pathlib import Path

from crowdsim.config import config_from_dict
from crowdsim.experiment import run_experiment
from crowdsim.report import write_report

COLUMNS = ("avg_V", "avg_N", "ratio", "avg_all", "G1", "G2", "G3", "G4")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--out", default="results/evac_table.csv")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = config_from_dict({"schema_version": 1, "mode": "evac", "seed_mode": "shared",
                            "seeds": list(range(1, args.seeds + 1)), "workers": args.workers})
    rows = run_experiment(cfg)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_report(rows, args.out)

    print(f"{'scenario':8} {'strategy':8} " + " ".join(f"{c:>8}" for c in COLUMNS))
    for r in rows:
        if r["aggregate"]:
            print(f"{r['scenario']:8} {r['strategy']:8} "
                  + " ".join(f"{r[c]:8.2f}" if r[c] is not None else f"{'-':>8}" for c in COLUMNS))
    print(f"report: {args.out}")


if __name__ == "__main__":
    main()
