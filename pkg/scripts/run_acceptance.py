#!/usr/bin/env python3
import argparse
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from qjw.cli import EXIT_OK, main as qjw_main  # noqa: E402

DESIGN_DIMS = (2, 3, 4, 5)
ENTANGLE_RUNS = (
    (2, "sic"),
    (2, "mub"),
    (2, "sim"),
    (2, "mum"),
    (3, "sic"),
    (3, "mub"),
    (3, "sim"),
    (3, "mum"),
)
SPIN_LADDER = (2, 3, 4, 5, 6)
COMPACT_AMBIENTS = ("2", "3", "2,2")


def acceptance_jobs(samples: int, long_runs: bool) -> list[tuple[str, list[str]]]:
    """(report file name, CLI argv) for every default report."""
    jobs = []
    for d in DESIGN_DIMS:
        for kind in ("sim", "mum"):
            jobs.append((f"design_{kind}_d{d}.json", ["design", "build", "--kind", kind, "--d", str(d)]))
    for d, kind in ENTANGLE_RUNS:
        argv = ["entangle", "table", "--d", str(d), "--design", kind, "--samples", str(samples)]
        jobs.append((f"concurrence_{kind}_d{d}.csv", argv))
    jobs.append(("witness_werner_d2.json", ["entangle", "witness", "--state", "werner", "--d", "2", "--p", "1"]))
    jobs.append(("witness_maxmixed_d3.json", ["entangle", "witness", "--state", "maxmixed", "--d", "3"]))
    table = ["jordan", "table"] + (["--long"] if long_runs else [])
    jobs.append(("tensor_table.csv", table))
    for k in SPIN_LADDER:
        argv = ["jordan", "reversible", "--spin", str(k), "--maxlen", "6" if k >= 4 else "4"]
        jobs.append((f"reversible_spin{k}.json", argv))
    for a in ("real:2", "real:3", "complex:2", "complex:3", "quat:2", "quat:3", "spin:3", "spin:4", "spin:5"):
        argv = ["jordan", "envelope", "--a", a] + (["--long"] if long_runs else [])
        jobs.append((f"envelope_{a.replace(':', '')}.json", argv))
    for ambient in COMPACT_AMBIENTS:
        jobs.append((f"compact_{ambient.replace(',', '_')}.json", ["jordan", "compact", "--ambient", ambient]))
    for case in ("qudit", "quabit"):
        argv = ["jordan", "universal", "--case", case] + (["--long"] if long_runs else [])
        jobs.append((f"universal_{case}.json", argv))
    jobs.append(("bloch_simplex_d3.json", ["bloch", "simplex", "--n", "9", "--kappa", "0.5", "--d", "3"]))
    return jobs


def main() -> None:
    parser = argparse.ArgumentParser(description="Write every default qjw report into a directory.")
    parser.add_argument("outdir", help="Directory for the report files.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=500, help="Random pure states per concurrence table.")
    parser.add_argument("--long", action="store_true", help="Include the long-running cases.")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failed = []
    jobs = acceptance_jobs(args.samples, args.long)
    for name, argv in jobs:
        code = qjw_main(argv + ["--seed", str(args.seed), "--quiet", "-o", str(outdir / name)])
        if code == EXIT_OK:
            print(f"wrote: {outdir / name}")
        else:
            print(f"failed ({code}): {' '.join(argv)}", file=sys.stderr)
            failed.append(name)

    print(f"reports: {len(jobs) - len(failed)}/{len(jobs)}")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
