#!/usr/bin/env python3
"""Pessimistic-hardware chain campaign: low transmission, rate vs distance.

Same ten-link layout as the optimistic campaign but with analyzer success
and interface transmission both at 0.10. The two-sender protocols starve
beyond roughly 25 km here (raw pairs arrive too slowly to assemble
purification groups within the memory-hold horizon), while the
midpoint-source variants keep delivering; expect zero-heavy columns.
"""

import argparse
from pathlib import Path

from replink import cli

VARIANTS = [
    ("mitm", None),
    ("sr", None),
    ("mps", 1.0),
    ("mps", 0.1),
    ("mps", 0.02),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results/fig9")
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for protocol, p_mid in VARIANTS:
        name = protocol if p_mid is None else f"{protocol}_pmid{p_mid:g}"
        argv = [
            "--preset", "fig9-pessimistic", "--protocol", protocol,
            "--trials", str(args.trials), "--seed", str(args.seed),
            "--analytic", "--output", str(outdir / f"{name}.csv"),
        ]
        if p_mid is not None:
            argv += ["--p-mid", str(p_mid)]
        code = cli.main(argv)
        if code != 0:
            return code
    print(f"wrote {len(VARIANTS)} tables to {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
