#!/usr/bin/env python3
"""Judge-score analysis on a CSV (or a bundled synthetic example).

Prints the per-dimension descriptives, percent improvement of strategy 2 over
strategy 1, the one-tailed Welch test, and inter-judge reliability (Pearson
and ICC(2,k)); writes plot_data.csv for the mean-with-SD chart.

Usage: python3 scripts/analyze_scores.py [scores.csv] [--out DIR]
"""

import argparse
import sys
from pathlib import Path

from studiomeet.stats import DIMENSIONS, compute_report, emit_plot_data, ingest_scores

EXAMPLE_CSV = """judge,scheme,strategy,novelty,completeness,feasibility
J1,S1,1,4,3,4
J2,S1,1,5,4,4
J1,S2,1,3,4,3
J2,S2,1,4,4,4
J1,S3,1,5,5,4
J2,S3,1,4,4,5
J1,S4,1,2,3,3
J2,S4,1,3,3,2
J1,S5,2,5,5,6
J2,S5,2,6,5,5
J1,S6,2,4,6,5
J2,S6,2,5,5,6
J1,S7,2,6,6,6
J2,S7,2,5,6,7
J1,S8,2,5,4,5
J2,S8,2,6,5,6
"""


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("scores", nargs="?", default=None)
    parser.add_argument("--out", default="./eval-out")
    args = parser.parse_args()

    if args.scores:
        records = ingest_scores(args.scores)
    else:
        print("(no CSV given; using the bundled synthetic example)\n", file=sys.stderr)
        records = ingest_scores(EXAMPLE_CSV.splitlines())

    report = compute_report(records)
    for dim in DIMENSIONS:
        r = report.dimensions[dim]
        s1, s2 = r.per_strategy[1], r.per_strategy[2]
        stars = " *" if r.significant else ""
        print(f"{dim:>13}:  S1 {s1.mean:.2f}±{s1.sd:.2f} (n={s1.n})"
              f"  S2 {s2.mean:.2f}±{s2.sd:.2f} (n={s2.n})"
              f"  +{r.percent_improvement:.2f}%"
              f"  t={r.test.t:.3f} df={r.test.df:.1f} p={r.test.p:.4f}{stars}")
    rel = report.reliability
    print(f"\nreliability across judges: pearson={rel.pearson:.3f}  ICC(2,k)={rel.icc2k:.3f}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "plot_data.csv").write_text(emit_plot_data(report))
    print(f"plot data written to {out_dir / 'plot_data.csv'}")


if __name__ == "__main__":
    main()
