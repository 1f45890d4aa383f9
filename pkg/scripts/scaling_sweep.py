#!/usr/bin/env python3
"""Sweep the optimal iteration count against search-space size.

Builds single-goal constant-branching instances for a range of depths, runs
the fixed-optimal schedule, and reports how the iteration count scales with
the number of paths (the log-log slope should sit at 1/2).
"""
import argparse
import math

import numpy as np

from qtreesearch import AmplificationSchedule, MarkPredicate, PreparationPlan, amplify, prepare_tree_state
from qtreesearch.generators import needle_problem


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--branching", type=int, default=2)
    parser.add_argument("--min-depth", type=int, default=4)
    parser.add_argument("--max-depth", type=int, default=14)
    args = parser.parse_args()

    print(f"{'depth':>6}{'paths':>10}{'k':>6}{'closed form':>12}{'final prob':>12}")
    ns, ks = [], []
    for depth in range(args.min_depth, args.max_depth + 1):
        problem = needle_problem(depth, args.branching)
        plan = PreparationPlan.for_problem(problem, depth)
        psi = prepare_tree_state(plan)
        _, report = amplify(psi, plan, MarkPredicate.goal_at(depth), AmplificationSchedule())
        n = args.branching**depth
        closed = round(math.pi / 4 * math.sqrt(n) - 0.5)
        print(
            f"{depth:>6}{report.n_paths:>10}{report.iterations:>6}{closed:>12}"
            f"{report.measured_probability:>12.6f}"
        )
        ns.append(n)
        ks.append(max(report.iterations, 1))
    slope = np.polyfit(np.log(ns), np.log(ks), 1)[0]
    print(f"\nlog-log slope of k vs N: {slope:.4f} (quadratic speedup = 0.5)")


if __name__ == "__main__":
    main()
