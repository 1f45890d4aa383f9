#!/usr/bin/env python3
"""Show how intermediate threshold amplifications reshape the search.

Two demonstrations:

1. fixtures/prune2.problem -- four equal depth-1 subtrees, one below the
   threshold: a single stage iterate moves the whole state onto it, and the
   terminal goal search becomes deterministic.
2. fixtures/grid4.problem -- route finding: pruning at half depth raises the
   terminal goal mass, cutting the remaining iteration count.
"""
from pathlib import Path

from qtreesearch import (
    AmplificationSchedule,
    PipelinePlan,
    PruningStage,
    load_problem,
    pruned_search,
    uninformed_search,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def show(title: str, report) -> None:
    print(f"\n== {title}")
    for i, st in enumerate(report.stages):
        tag = " (skipped)" if st.skipped else ""
        print(
            f"  stage {i}: level={st.level} tau={st.threshold:g} k={st.iterations}"
            f" mass {st.mass_before:.6f} -> {st.mass_after:.6f}{tag}"
        )
    print(
        f"  terminal: a={report.initial_probability:.6f} k={report.iterations}"
        f" final={report.measured_probability:.6f} queries={report.oracle_queries}"
    )


def main() -> None:
    prune2 = load_problem(FIXTURES / "prune2.problem")
    plan = PipelinePlan(
        problem=prune2,
        depth=2,
        stages=(PruningStage(level=1, threshold=2.0, iterations=1),),
        terminal_schedule=AmplificationSchedule(),
    )
    path, report = pruned_search(plan, seed=0)
    show("prune2: one iterate reaches the below-threshold subtree with certainty", report)
    print(f"  solution: {path}")

    grid = load_problem(FIXTURES / "grid4.problem")
    _, plain = uninformed_search(grid, 6, AmplificationSchedule(seed=0))
    print(
        f"\n== grid4 without pruning: a={plain.initial_probability:.6f}"
        f" k={plain.iterations} queries={plain.oracle_queries}"
    )
    plan = PipelinePlan(
        problem=grid,
        depth=6,
        stages=(PruningStage(level=3, threshold=3.5, iterations=1),),
        terminal_schedule=AmplificationSchedule(),
    )
    path, report = pruned_search(plan, seed=0)
    show("grid4 with one pruning stage at level 3", report)
    print(f"  solution: {path}")


if __name__ == "__main__":
    main()
