"""Goal phase oracle and the generalized amplitude-amplification iterate.

The iterate reflects about the state the preparation pipeline actually
produced (for a plain run that state is the superposition tree itself), so
the marked mass after k iterations follows sin^2((2k+1) asin(sqrt(a)))
exactly, whatever the amplitude profile. Non-constant branching only changes
a, never the two-dimensional rotation.

Cost is counted in phase-oracle applications, one per iterate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .problem_model import MissingHeuristicError, ProblemSpec
from .statevector import (
    Entry,
    LayoutMismatchError,
    TreeState,
    inner_product,
)
from .tree_prep import PreparationPlan, prepare_tree_state

GOAL = "goal"
HEURISTIC_THRESHOLD = "heuristic_threshold"

POLICY_FIXED_OPTIMAL = "fixed_optimal"
POLICY_EXPLICIT = "explicit"
POLICY_EXPONENTIAL = "exponential_search"


class QueryCounter:
    """Per-run tally of phase-oracle applications."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def increment(self) -> None:
        self.count += 1


@dataclass(frozen=True)
class MarkPredicate:
    """Which configurations the phase oracle flips.

    ``depth_context`` is the prefix length whose node value is tested; frozen
    dead-end configurations are never marked, even when their node is a goal.
    """

    kind: str
    depth_context: int
    threshold: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (GOAL, HEURISTIC_THRESHOLD):
            raise ValueError(f"unknown predicate kind {self.kind!r}")
        if self.depth_context < 0:
            raise ValueError("depth_context must be >= 0")

    @classmethod
    def goal_at(cls, depth: int) -> "MarkPredicate":
        return cls(kind=GOAL, depth_context=depth)

    @classmethod
    def threshold_at(cls, depth: int, threshold: float) -> "MarkPredicate":
        return cls(kind=HEURISTIC_THRESHOLD, depth_context=depth, threshold=threshold)

    def marks(self, problem: ProblemSpec, path: tuple[int, ...], node: int, dead: bool) -> bool:
        if dead or len(path) != self.depth_context:
            return False
        if self.kind == GOAL:
            return node in problem.goals
        return problem.h(node) <= self.threshold

    def holds_classically(self, problem: ProblemSpec, path: tuple[int, ...]) -> bool:
        """Re-run the transitions and evaluate the predicate from scratch."""
        if len(path) != self.depth_context:
            return False
        terminal = problem.follow(tuple(path))
        if terminal is None:
            return False
        if self.kind == GOAL:
            return terminal in problem.goals
        return problem.h(terminal) <= self.threshold


@dataclass(frozen=True)
class AmplificationSchedule:
    """Iteration-count policy plus the RNG seed and query budget for a run."""

    policy: str = POLICY_FIXED_OPTIMAL
    iterations: int = 0
    growth: float = 1.2
    seed: int = 0
    max_oracle_queries: int = 10_000

    def __post_init__(self) -> None:
        if self.policy not in (POLICY_FIXED_OPTIMAL, POLICY_EXPLICIT, POLICY_EXPONENTIAL):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.iterations < 0:
            raise ValueError("explicit iteration count must be >= 0")
        if not 1.0 < self.growth <= 4.0 / 3.0:
            raise ValueError("growth factor must lie in (1, 4/3]")
        if self.max_oracle_queries < 0:
            raise ValueError("query budget must be >= 0")


@dataclass(frozen=True)
class StageRecord:
    """Mass accounting for one pruning stage."""

    level: int
    threshold: float
    iterations: int
    oracle_queries: int
    mass_before: float
    mass_after: float
    skipped: bool = False


@dataclass(frozen=True)
class RunReport:
    n_paths: int
    m_marked: int
    initial_probability: float
    theta: float
    iterations: int
    oracle_queries: int
    predicted_probability: float
    measured_probability: float
    samples_drawn: int
    seed: int
    warnings: tuple[str, ...]
    paper_node_width: int
    node_width: int
    samples: tuple[tuple[tuple[int, ...], int], ...] = ()
    stages: tuple[StageRecord, ...] = ()

    def to_record(self) -> str:
        """One flat key=value line; floats carry 12 significant digits."""
        f = lambda x: format(x, ".12g")
        parts = [
            f"n_paths={self.n_paths}",
            f"m_marked={self.m_marked}",
            f"a={f(self.initial_probability)}",
            f"theta={f(self.theta)}",
            f"iterations={self.iterations}",
            f"oracle_queries={self.oracle_queries}",
            f"predicted_probability={f(self.predicted_probability)}",
            f"measured_probability={f(self.measured_probability)}",
            f"samples_drawn={self.samples_drawn}",
            f"seed={self.seed}",
            "warnings=" + ("|".join(self.warnings) if self.warnings else "-"),
            f"paper_node_width={self.paper_node_width}",
            f"node_width={self.node_width}",
        ]
        for i, st in enumerate(self.stages):
            parts.append(
                f"stage{i}=level:{st.level},tau:{f(st.threshold)},k:{st.iterations}"
                f",queries:{st.oracle_queries},before:{f(st.mass_before)}"
                f",after:{f(st.mass_after)},skipped:{int(st.skipped)}"
            )
        return " ".join(parts)


def apply_oracle(
    state: TreeState,
    problem: ProblemSpec,
    predicate: MarkPredicate,
    counter: QueryCounter | None = None,
) -> TreeState:
    """Flip the amplitude sign of every marked configuration (one oracle query)."""
    if counter is not None:
        counter.increment()
    if state.mode == "dense":
        vec = state.vector.copy()
        for idx in _marked_indices(state.layout, problem, predicate):
            vec[idx] = -vec[idx]
        return TreeState(state.layout, "dense", vector=vec, warnings=list(state.warnings))
    entries = {
        path: (Entry(-e.amp, e.node, e.dead) if predicate.marks(problem, path, e.node, e.dead) else e)
        for path, e in state.entries.items()
    }
    return TreeState(state.layout, "structured", entries=entries, warnings=list(state.warnings))


def _marked_indices(layout, problem: ProblemSpec, predicate: MarkPredicate) -> list[int]:
    from .problem_model import enumerate_paths

    out = []
    for path, terminal, _ in enumerate_paths(problem, predicate.depth_context):
        if predicate.marks(problem, path, terminal, False):
            out.append(layout.index_of(terminal, path))
    return out


def reflect_about(state: TreeState, axis: TreeState) -> TreeState:
    """(2|axis><axis| - I) |state>; both states must share a layout."""
    if state.layout != axis.layout:
        raise LayoutMismatchError("reflection axis has a different register layout")
    alpha = inner_product(axis, state)
    warnings = list(state.warnings)
    if state.mode == "dense" or axis.mode == "dense":
        sv = state.to_dense().vector if state.mode == "structured" else state.vector
        av = axis.to_dense().vector if axis.mode == "structured" else axis.vector
        return TreeState(state.layout, "dense", vector=2 * alpha * av - sv, warnings=warnings)
    entries: dict[tuple[int, ...], Entry] = {}
    for path, e in axis.entries.items():
        other = state.entries.get(path)
        if other is not None and other.node != e.node:
            raise ValueError(
                "states disagree on the node value of a shared prefix; "
                "they come from different preparation pipelines"
            )
        amp = 2 * alpha * e.amp - (other.amp if other is not None else 0j)
        entries[path] = Entry(amp, e.node, e.dead)
    for path, e in state.entries.items():
        if path not in entries:
            entries[path] = Entry(-e.amp, e.node, e.dead)
    return TreeState(state.layout, "structured", entries=entries, warnings=warnings)


def reflect_about_prepared(state: TreeState, plan: PreparationPlan) -> TreeState:
    """Reflection about the clean superposition tree of ``plan``."""
    return reflect_about(state, prepare_tree_state(plan, mode=state.mode))


def optimal_iterations(a: float) -> int:
    """floor(pi / (4 asin(sqrt(a)))) for a in (0, 1/2); 0 at or above 1/2."""
    if not 0.0 < a <= 1.0:
        raise ValueError("initial success probability must lie in (0, 1]")
    if a >= 0.5:
        return 0
    return int(math.pi / (4.0 * math.asin(math.sqrt(a))))


def predicted_mass(a: float, k: int) -> float:
    """Marked mass after k iterates from initial mass a: sin^2((2k+1) asin(sqrt(a)))."""
    theta = math.asin(math.sqrt(a))
    return math.sin((2 * k + 1) * theta) ** 2


class _RunArrays:
    """Aligned-array view of a state for fast iterate application.

    The iterate (oracle then reflection about the starting state) never
    changes the support, so amplitudes can live in one complex vector.
    """

    def __init__(self, state: TreeState, problem: ProblemSpec, predicate: MarkPredicate):
        self.layout = state.layout
        self.mode = state.mode
        self.problem = problem
        self.warnings = list(state.warnings)
        if state.mode == "dense":
            from .problem_model import enumerate_paths

            self.keys = None
            self.nodes = None
            self.dead = None
            self.axis = state.vector.copy()
            marked = _marked_indices(state.layout, problem, predicate)
            self.marked = np.array(marked, dtype=np.intp)
            self.n_paths = len(enumerate_paths(problem, predicate.depth_context))
        else:
            items = state.sorted_entries()
            self.keys = [p for p, _ in items]
            self.nodes = [e.node for _, e in items]
            self.dead = [e.dead for _, e in items]
            self.axis = np.array([e.amp for _, e in items], dtype=np.complex128)
            self.marked = np.array(
                [
                    i
                    for i, (p, e) in enumerate(items)
                    if predicate.marks(problem, p, e.node, e.dead)
                ],
                dtype=np.intp,
            )
            self.n_paths = sum(
                1 for p, e in items if not e.dead and len(p) == predicate.depth_context
            )
        self.m_marked = int(self.marked.size)
        self.amps = self.axis.copy()

    def reset(self) -> None:
        self.amps = self.axis.copy()

    def marked_mass(self) -> float:
        if self.m_marked == 0:
            return 0.0
        chunk = self.amps[self.marked]
        return float(np.vdot(chunk, chunk).real)

    def iterate(self, k: int, counter: QueryCounter) -> None:
        for _ in range(k):
            self.amps[self.marked] = -self.amps[self.marked]
            counter.increment()
            alpha = np.vdot(self.axis, self.amps)
            self.amps = 2 * alpha * self.axis - self.amps

    def sample(self, rng: np.random.Generator) -> tuple[tuple[int, ...], int, int]:
        probs = np.abs(self.amps) ** 2
        probs /= probs.sum()
        i = int(rng.choice(len(probs), p=probs))
        if self.mode == "dense":
            node, actions = self.layout.decode(i)
            prefix: list[int] = []
            s = self.problem.root
            for a in actions:  # frozen configurations carry a shorter true prefix
                nxt = self.problem.transition.get((s, a))
                if nxt is None:
                    break
                prefix.append(a)
                s = nxt
            return tuple(prefix), node, i
        return self.keys[i], self.nodes[i], i

    def to_state(self) -> TreeState:
        if self.mode == "dense":
            return TreeState(self.layout, "dense", vector=self.amps.copy(), warnings=list(self.warnings))
        entries = {
            p: Entry(complex(self.amps[i]), self.nodes[i], self.dead[i])
            for i, p in enumerate(self.keys)
        }
        return TreeState(self.layout, "structured", entries=entries, warnings=list(self.warnings))


def amplify(
    x0: TreeState,
    plan: PreparationPlan,
    predicate: MarkPredicate,
    sched: AmplificationSchedule,
) -> tuple[TreeState, RunReport]:
    """Amplify the marked mass of ``x0`` per the schedule policy.

    ``x0`` is taken to be the output of the preparation pipeline; the iterate
    reflects about it. Policies:

    * fixed_optimal -- k = floor(pi/4theta) computed from the simulated marked
      mass (privileged access a physical device would not have).
    * explicit -- exactly ``sched.iterations`` iterates.
    * exponential_search -- unknown-M recipe: iterate counts drawn uniformly
      from a geometrically growing range, one measurement per round, classical
      validation of the sample, stop on success or exhausted query budget.
    """
    if x0.layout != plan.layout:
        raise LayoutMismatchError("state layout does not match the plan")
    if predicate.kind == HEURISTIC_THRESHOLD and plan.problem.heuristic is None:
        raise MissingHeuristicError("threshold predicate needs heuristic values")
    run = _RunArrays(x0, plan.problem, predicate)
    counter = QueryCounter()
    warnings: list[str] = []
    a = run.marked_mass()
    theta = math.asin(math.sqrt(min(a, 1.0)))

    def report(k: int, samples, predicted: float) -> RunReport:
        return RunReport(
            n_paths=run.n_paths,
            m_marked=run.m_marked,
            initial_probability=a,
            theta=theta,
            iterations=k,
            oracle_queries=counter.count,
            predicted_probability=predicted,
            measured_probability=run.marked_mass(),
            samples_drawn=len(samples),
            seed=sched.seed,
            warnings=tuple(warnings),
            paper_node_width=plan.layout.paper_node_width,
            node_width=plan.layout.node_width,
            samples=tuple(samples),
        )

    if sched.policy == POLICY_FIXED_OPTIMAL:
        if a == 0.0:
            warnings.append("no_marked_configurations")
            return run.to_state(), report(0, (), 0.0)
        if a >= 0.5:
            warnings.append("single_measurement_sufficient")
            k = 0
        else:
            k = optimal_iterations(a)
        run.iterate(k, counter)
        return run.to_state(), report(k, (), predicted_mass(a, k))

    if sched.policy == POLICY_EXPLICIT:
        k = sched.iterations
        run.iterate(k, counter)
        return run.to_state(), report(k, (), predicted_mass(a, k))

    # exponential_search
    rng = np.random.default_rng(sched.seed)
    sqrt_n = math.sqrt(max(run.n_paths, 1))
    # zero-iterate rounds cost no oracle queries, so a round cap is needed to
    # terminate on unsolvable instances; it is far above any plausible success time
    max_rounds = 64 + 4 * int(sqrt_n)
    m = 1.0
    total_k = 0
    samples: list[tuple[tuple[int, ...], int]] = []
    last_k = 0
    for _ in range(max_rounds):
        k = int(rng.integers(0, max(int(m), 1)))
        if counter.count + k > sched.max_oracle_queries:
            warnings.append("budget_exhausted")
            break
        run.reset()
        run.iterate(k, counter)
        total_k += k
        last_k = k
        path, node, _ = run.sample(rng)
        samples.append((path, node))
        if predicate.holds_classically(plan.problem, path):
            return run.to_state(), report(total_k, samples, predicted_mass(a, k))
        m = min(sched.growth * m, sqrt_n)
        if counter.count >= sched.max_oracle_queries:
            warnings.append("budget_exhausted")
            break
    else:
        warnings.append("round_limit_reached")
    return run.to_state(), report(total_k, samples, predicted_mass(a, last_k))
