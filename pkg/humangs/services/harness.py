"""
Experiment harness: graph generators, truthful answer simulation, the
baselines, and the phase-based experiment loop with its aggregates.
"""
from collections import deque
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from humangs.config.settings import settings
from humangs.core.exceptions import FormatError, TooLarge, WrongStructure
from humangs.core.logging import logger
from humangs.models.experiment import (
    AggregateRow,
    Algorithm,
    ExperimentConfig,
    ExperimentResult,
    PhaseSummary,
    PhaseTrace,
    SweepRow,
    TrialRow,
)
from humangs.models.plan import Variant
from humangs.services.graph_core import Dag, Direction, NodeId, is_down_forest, induced_candidate_graph
from humangs.services.semantics import AnswerSet, TargetSet, candidate_set, simulate
from humangs.services.solver_single_bounded import solve
from humangs.utils.graph_io import load_graph

Seed = Union[int, np.random.Generator]


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def gen_balanced(m: int, d: int, direction: Direction = Direction.DOWN, max_nodes: Optional[int] = None) -> Dag:
    """Complete m-ary tree of depth d with nodes n0, n1, ... in BFS order"""
    if m < 1 or d < 0:
        raise ValueError(f"Need m >= 1 and d >= 0, got m={m}, d={d}")
    max_nodes = settings.MAX_GENERATED_NODES if max_nodes is None else max_nodes
    n = d + 1 if m == 1 else (m ** (d + 1) - 1) // (m - 1)
    if n > max_nodes:
        raise TooLarge(f"Balanced tree m={m}, d={d} has {n} nodes, limit is {max_nodes}")

    names = [f"n{i}" for i in range(n)]
    down = [[c for c in range(m * i + 1, m * i + m + 1) if c < n] for i in range(n)]
    if direction is Direction.DOWN:
        return Dag(names, down, topological_order=range(n))
    up: List[List[int]] = [[] for _ in range(n)]
    for parent, kids in enumerate(down):
        for c in kids:
            up[c].append(parent)
    return Dag(names, up, topological_order=range(n - 1, -1, -1))


def gen_random_tree(n: int, max_children: int, seed: Seed = 0) -> Dag:
    """Downward tree grown by attaching each node to a uniformly chosen open parent"""
    if n < 1 or max_children < 1:
        raise ValueError(f"Need n >= 1 and max_children >= 1, got n={n}, max_children={max_children}")
    draws = _rng(seed).random(n)
    children: List[List[int]] = [[] for _ in range(n)]
    open_parents = [0]
    for v in range(1, n):
        slot = int(draws[v] * len(open_parents))
        p = open_parents[slot]
        children[p].append(v)
        if len(children[p]) == max_children:
            open_parents[slot] = open_parents[-1]
            open_parents.pop()
        open_parents.append(v)
    return Dag([f"n{i}" for i in range(n)], children, topological_order=range(n))


def graph_from_spec(spec: str, seed: int = 0) -> Dag:
    """Parse balanced:<m>:<d>[:up] or random:<n>:<max_children>"""
    parts = spec.split(":")
    try:
        if parts[0] == "balanced" and len(parts) in (3, 4):
            if len(parts) == 4 and parts[3] not in ("up", "down"):
                raise FormatError(f"Unknown direction in generator spec: {parts[3]}")
            direction = Direction(parts[3]) if len(parts) == 4 else Direction.DOWN
            return gen_balanced(int(parts[1]), int(parts[2]), direction)
        if parts[0] == "random" and len(parts) == 3:
            return gen_random_tree(int(parts[1]), int(parts[2]), seed)
    except ValueError as e:
        raise FormatError(f"Invalid generator spec {spec!r}: {e}") from e
    raise FormatError(f"Invalid generator spec {spec!r}; expected balanced:<m>:<d>[:up] or random:<n>:<max_children>")


def load_source(cfg: ExperimentConfig) -> Dag:
    if cfg.graph is not None:
        return load_graph(cfg.graph)
    if cfg.gen is not None:
        return graph_from_spec(cfg.gen, cfg.seed)
    raise ValueError("Experiment needs a graph file or a generator spec")


def restrict_depth(dag: Dag, max_depth: int) -> Dag:
    """Keep only nodes at most max_depth below a root of a downward forest"""
    if not is_down_forest(dag):
        raise WrongStructure("restrict_depth needs a downward forest")
    depth: Dict[NodeId, int] = {}
    for u in dag.topological_order:
        depth[u] = depth[dag.parents[u][0]] + 1 if dag.parents[u] else 0
    kept = [u for u in range(dag.n) if depth[u] <= max_depth]
    position = {old: new for new, old in enumerate(kept)}
    children = [[position[c] for c in dag.children[u] if c in position] for u in kept]
    order = [position[u] for u in dag.topological_order if u in position]
    return Dag([dag.names[u] for u in kept], children, topological_order=order)


def simulate_answers(dag: Dag, targets: TargetSet, questions: Sequence[NodeId]) -> AnswerSet:
    return simulate(dag, targets, questions)


def baseline_random(dag: Dag, k: int, seed: Seed = 0) -> List[NodeId]:
    """k distinct nodes, uniformly without replacement"""
    size = min(k, dag.n)
    return sorted(int(u) for u in _rng(seed).choice(dag.n, size=size, replace=False))


def baseline_general_first(dag: Dag, k: int) -> List[NodeId]:
    """First k nodes of a breadth-first traversal, roots excluded when there is one root"""
    if not is_down_forest(dag):
        raise WrongStructure("baseline_general_first needs a downward tree or forest")
    roots = dag.roots()
    queue = deque(dag.children[roots[0]] if len(roots) == 1 else roots)
    picked: List[NodeId] = []
    while queue and len(picked) < k:
        u = queue.popleft()
        picked.append(u)
        queue.extend(dag.children[u])
    return picked


def _pick_questions(dag: Dag, cfg: ExperimentConfig, rng: Optional[np.random.Generator]) -> List[NodeId]:
    if cfg.algorithm is Algorithm.HUMANGS:
        return solve(dag, cfg.k).questions
    if cfg.algorithm is Algorithm.RANDOM:
        return baseline_random(dag, cfg.k, rng if rng is not None else cfg.seed)
    return baseline_general_first(dag, cfg.k)


def run_phases(dag: Dag, target: NodeId, cfg: ExperimentConfig, trial: int = 0,
               rng: Optional[np.random.Generator] = None,
               first_questions: Optional[Sequence[NodeId]] = None) -> List[PhaseTrace]:
    """Ask, shrink to the candidate set, and repeat on the induced graph"""
    target_name = dag.names[target]
    graph = dag
    traces: List[PhaseTrace] = []
    for phase in range(1, cfg.phases + 1):
        if graph.n == 1:
            break
        if phase == 1 and first_questions is not None:
            questions = list(first_questions)
        else:
            questions = _pick_questions(graph, cfg, rng)
        targets = TargetSet(frozenset({graph.index_of(target_name)}))
        cand = candidate_set(graph, simulate_answers(graph, targets, questions), Variant.SINGLE)
        traces.append(PhaseTrace(trial=trial, phase=phase, questions=graph.names_of(questions),
                                 candidate_size=len(cand)))
        if len(cand) == 1 or phase == cfg.phases:
            break
        graph = induced_candidate_graph(graph, cand)
    return traces


def _padded_sizes(traces: Sequence[PhaseTrace], phases: int, initial: int) -> List[int]:
    """Candidate size after each phase, carrying the last size forward"""
    sizes, last = [], initial
    by_phase = {t.phase: t.candidate_size for t in traces}
    for phase in range(1, phases + 1):
        last = by_phase.get(phase, last)
        sizes.append(last)
    return sizes


def summarize_phases(traces: Sequence[Sequence[PhaseTrace]], cfg: ExperimentConfig) -> PhaseSummary:
    """Mean phases until the target is isolated, and mean questions asked"""
    phases, questions, identified = [], [], []
    for trace in traces:
        done = not trace or trace[-1].candidate_size == 1
        identified.append(done)
        phases.append(len(trace) if done else cfg.phases)
        questions.append(sum(len(t.questions) for t in trace))
    return PhaseSummary(
        algorithm=cfg.algorithm,
        k=cfg.k,
        mean_phases=float(np.mean(phases)),
        mean_questions=float(np.mean(questions)),
        identified_fraction=float(np.mean(identified)),
    )


def run_experiment(cfg: ExperimentConfig, dag: Optional[Dag] = None) -> ExperimentResult:
    """Per-trial and per-phase candidate sizes over uniformly sampled targets"""
    dag = load_source(cfg) if dag is None else dag
    if cfg.depth is not None:
        dag = restrict_depth(dag, cfg.depth)
    runs = cfg.random_runs if cfg.algorithm is Algorithm.RANDOM else 1
    # deterministic algorithms ask the same first-phase questions in every trial
    first = None if cfg.algorithm is Algorithm.RANDOM else _pick_questions(dag, cfg, None)
    logger.info(f"Experiment: {cfg.algorithm.value}, k={cfg.k}, {cfg.trials} trials on {dag!r}")

    rows: List[TrialRow] = []
    all_traces: List[List[PhaseTrace]] = []
    per_trial = np.zeros((cfg.trials, cfg.phases))
    for trial in range(cfg.trials):
        target = int(np.random.default_rng([cfg.seed, trial]).integers(dag.n))
        sizes = []
        for run in range(runs):
            rng = np.random.default_rng([cfg.seed, trial, run + 1])
            traces = run_phases(dag, target, cfg, trial=trial, rng=rng, first_questions=first)
            all_traces.append(traces)
            sizes.append(_padded_sizes(traces, cfg.phases, dag.n))
        per_trial[trial] = np.mean(sizes, axis=0)
        rows.extend(TrialRow(algorithm=cfg.algorithm, phase=phase + 1, k=cfg.k, trial=trial,
                             candidate_size=float(per_trial[trial, phase]))
                    for phase in range(cfg.phases))
        logger.debug(f"Trial {trial}: target {dag.names[target]}, sizes {per_trial[trial].tolist()}")

    means = per_trial.mean(axis=0)
    aggregates = [AggregateRow(algorithm=cfg.algorithm, phase=phase + 1, k=cfg.k,
                               mean_candidate_size=float(means[phase]))
                  for phase in range(cfg.phases)]
    return ExperimentResult(rows=rows, aggregates=aggregates, summary=summarize_phases(all_traces, cfg))


def run_sweep(cfg: ExperimentConfig, vary: str, values: Sequence[int], dag: Optional[Dag] = None) -> List[SweepRow]:
    """Single-phase mean candidate size as k or the depth restriction varies"""
    if vary not in ("k", "depth"):
        raise ValueError(f"Can only vary k or depth, got {vary}")
    dag = load_source(cfg) if dag is None else dag
    rows = []
    for value in values:
        point = cfg.model_copy(update={vary: value, "phases": 1})
        result = run_experiment(point, dag=dag)
        rows.append(SweepRow(algorithm=cfg.algorithm, vary=vary, value=value,
                             mean_candidate_size=result.aggregates[0].mean_candidate_size))
        logger.info(f"Sweep {vary}={value}: mean candidate size {rows[-1].mean_candidate_size:.2f}")
    return rows
