"""
Exhaustive reference answers, computed straight from the definitions with
plain sets. Shares nothing with the solvers or the bitset index.
"""
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from humangs.config.settings import settings
from humangs.core.exceptions import TooLarge
from humangs.core.logging import logger
from humangs.models.plan import Mode, Plan, Variant, VerifyReport
from humangs.services.graph_core import Dag

Reach = Dict[int, FrozenSet[int]]


def _reach_sets(dag: Dag) -> Reach:
    graph = dag.to_networkx()
    return {u: frozenset(nx.descendants(graph, u)) | {u} for u in range(dag.n)}


def _antichains(dag: Dag, reach: Reach, limit: int) -> List[Tuple[int, ...]]:
    if dag.n > limit:
        raise TooLarge(f"Oracle enumeration is limited to {limit} nodes, graph has {dag.n}")
    found: List[Tuple[int, ...]] = []

    def extend(start: int, chosen: Tuple[int, ...]) -> None:
        for u in range(start, dag.n):
            if all(u not in reach[v] and v not in reach[u] for v in chosen):
                found.append(chosen + (u,))
                extend(u + 1, chosen + (u,))

    extend(0, ())
    return sorted(found, key=lambda a: (len(a), a))


def enumerate_antichains(dag: Dag, limit: Optional[int] = None) -> List[FrozenSet[int]]:
    """Every non-empty antichain, by size and then lexicographically"""
    limit = settings.ANTICHAIN_ENUMERATION_LIMIT if limit is None else limit
    return [frozenset(a) for a in _antichains(dag, _reach_sets(dag), limit)]


def _candidates(dag: Dag, reach: Reach, targets: Sequence[int], questions: Sequence[int],
                variant: Variant) -> FrozenSet[int]:
    everything = frozenset(range(dag.n))
    cand = everything
    for u in questions:
        if reach[u] & set(targets):
            if variant is Variant.SINGLE:
                cand &= reach[u]
            else:
                cand &= everything - {v for v in range(dag.n) if u in reach[v] and v != u}
        else:
            cand &= everything - reach[u]
    return cand


def _worst(dag: Dag, reach: Reach, questions: Sequence[int], variant: Variant,
           target_sets: Sequence[Tuple[int, ...]]) -> Tuple[int, Tuple[int, ...]]:
    worst, witness = -1, ()
    for targets in target_sets:
        size = len(_candidates(dag, reach, targets, questions, variant))
        if size > worst:
            worst, witness = size, targets
    return worst, witness


def _target_sets(dag: Dag, reach: Reach, variant: Variant) -> List[Tuple[int, ...]]:
    if variant is Variant.SINGLE:
        return [(t,) for t in range(dag.n)]
    return _antichains(dag, reach, settings.ANTICHAIN_ENUMERATION_LIMIT)


def oracle_wcase(dag: Dag, questions: Sequence[int], variant: Variant) -> int:
    reach = _reach_sets(dag)
    return _worst(dag, reach, sorted(questions), variant, _target_sets(dag, reach, variant))[0]


def oracle_optimal(dag: Dag, k: Optional[int], variant: Variant, mode: Mode = Mode.BOUNDED) -> Plan:
    """Optimal plan for any variant/mode cell by exhaustive search"""
    if variant is Variant.SINGLE:
        limit = settings.ORACLE_SINGLE_MAX_NODES
    elif mode is Mode.UNLIMITED:
        limit = settings.ORACLE_MULTI_UNLIMITED_MAX_NODES
    else:
        limit = settings.ORACLE_MULTI_MAX_NODES
    if dag.n > limit:
        raise TooLarge(f"Oracle for {variant.value}/{mode.value} is limited to {limit} nodes, graph has {dag.n}")

    reach = _reach_sets(dag)
    target_sets = _target_sets(dag, reach, variant)

    if mode is Mode.BOUNDED:
        best, best_questions = dag.n + 1, ()
        for questions in combinations(range(dag.n), min(k, dag.n)):
            value = _worst(dag, reach, questions, variant, target_sets)[0]
            if value < best:
                best, best_questions = value, questions
        return Plan(variant=variant, mode=mode, k=k, method="oracle", wcase=best, questions=list(best_questions))

    # Unlimited: the smallest set leaving exactly the targets (Single: one node)
    for size in range(dag.n + 1):
        for questions in combinations(range(dag.n), size):
            if all(len(_candidates(dag, reach, t, questions, variant)) == len(t) for t in target_sets):
                wcase = max(len(t) for t in target_sets)
                logger.debug(f"Oracle unlimited plan of size {size}")
                return Plan(variant=variant, mode=mode, method="oracle", wcase=wcase, questions=list(questions))
    raise AssertionError("asking every node always isolates the targets")


def verify_plan(dag: Dag, plan: Plan, variant: Optional[Variant] = None) -> VerifyReport:
    """Recompute a plan's worst case from scratch and compare"""
    variant = plan.variant if variant is None else variant
    reach = _reach_sets(dag)
    found, witness = _worst(dag, reach, sorted(plan.questions), variant, _target_sets(dag, reach, variant))
    within_budget = plan.k is None or plan.mode is Mode.UNLIMITED or len(plan.questions) <= plan.k
    passed = found == plan.wcase and within_budget
    if not passed:
        logger.warning(f"Plan check failed: expected {plan.wcase}, found {found}, within budget {within_budget}")
    return VerifyReport(passed=passed, expected_wcase=plan.wcase, found_wcase=found,
                        witness_targets=dag.names_of(witness))
