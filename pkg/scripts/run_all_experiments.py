"""Run every registered experiment and print the combined report.

Results land in one directory (CSV rows plus a JSON summary per
experiment) and the per-check verdict lines go to stdout.  Exit status
is 0 only if every check of every run passed.

Two checks are red by design and stay red: trp-trajectory measures the
unconstrained process against the discounted model, whose late
checkpoints it provably misses, and boost-convergence holds the sampled
triangle family to a per-edge band tighter than its binomial spread.
Runs with --skip trp-trajectory boost-convergence are all green.
"""

import argparse
import sys

from latinlab.experiments import EXPERIMENTS, check_lines, make_spec, run_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", metavar="ID",
                    help="run only these experiments")
    ap.add_argument("--skip", nargs="*", default=[], metavar="ID",
                    help="leave these experiments out")
    args = ap.parse_args(argv)

    ids = args.only if args.only else sorted(EXPERIMENTS)
    unknown = [i for i in ids + args.skip if i not in EXPERIMENTS]
    if unknown:
        ap.error(f"unknown experiment ids: {', '.join(unknown)}")
    ids = [i for i in ids if i not in set(args.skip)]

    all_ok = True
    for ident in ids:
        spec = make_spec(ident, seed=args.seed, threads=args.threads,
                         out_dir=args.out)
        summary = run_experiment(spec)
        lines, ok = check_lines(summary)
        print("\n".join(lines))
        all_ok &= ok
    print(f"{'all checks passed' if all_ok else 'some checks failed'} "
          f"({len(ids)} experiments, results in {args.out}/)")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
