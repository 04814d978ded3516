"""
Single-target solvers without a budget: the smallest question set that
always pins the target down to one node.
"""
from itertools import combinations
from typing import Iterable, Optional

from humangs.config.settings import settings
from humangs.core.exceptions import NoSolverApplicable, TooLarge, WrongStructure
from humangs.core.logging import logger
from humangs.models.plan import Mode, Plan, Structure, Variant
from humangs.services.graph_core import Dag, NodeId, is_down_forest, is_up_forest
from humangs.services.semantics import wcase_single


def _plan(method: str, questions: Iterable[NodeId], wcase: int = 1) -> Plan:
    return Plan(variant=Variant.SINGLE, mode=Mode.UNLIMITED, method=method,
                slack=0, wcase=wcase, questions=sorted(questions))


def solve_down_forest_unlimited(forest: Dag) -> Plan:
    """Every node except one root"""
    if not is_down_forest(forest):
        raise WrongStructure("solve_down_forest_unlimited needs a downward forest")
    spared = forest.roots()[0]
    return _plan("unlimited-down-forest", (u for u in range(forest.n) if u != spared))


def solve_up_forest_unlimited(forest: Dag) -> Plan:
    """All leaves but at most one, plus every node with a single in-neighbour.

    A leaf may go unasked only if its parent does not have exactly two
    in-neighbours: with two, the parent's other branch alone would
    identify it.
    """
    if not is_up_forest(forest):
        raise WrongStructure("solve_up_forest_unlimited needs an upward forest")
    leaves = forest.roots()
    spared: Optional[NodeId] = next(
        (f for f in leaves if not forest.children[f] or len(forest.parents[forest.children[f][0]]) != 2),
        None,
    )
    unary = [u for u in range(forest.n) if len(forest.parents[u]) == 1]
    questions = [f for f in leaves if f != spared] + unary
    logger.debug(f"Up-forest unlimited: spared leaf {spared}, {len(unary)} unary nodes")
    return _plan("unlimited-up-forest", questions)


def solve_dag_unlimited(dag: Dag, max_nodes: Optional[int] = None) -> Plan:
    """Smallest question set with worst case 1, by increasing size"""
    max_nodes = settings.BRUTE_FORCE_MAX_NODES if max_nodes is None else max_nodes
    if dag.n > max_nodes:
        raise TooLarge(f"Exhaustive unlimited search is limited to {max_nodes} nodes, graph has {dag.n}")
    for size in range(dag.n + 1):
        for questions in combinations(range(dag.n), size):
            if wcase_single(dag, questions) == 1:
                return _plan("unlimited-dag", questions)
    raise AssertionError("asking every node always identifies the target")


def solve_unlimited(dag: Dag, structure: Structure = Structure.AUTO) -> Plan:
    if structure is Structure.DOWN_FOREST or (structure is Structure.AUTO and is_down_forest(dag)):
        return solve_down_forest_unlimited(dag)
    if structure is Structure.UP_FOREST or (structure is Structure.AUTO and is_up_forest(dag)):
        return solve_up_forest_unlimited(dag)
    try:
        return solve_dag_unlimited(dag)
    except TooLarge as e:
        raise NoSolverApplicable(f"General DAG with {dag.n} nodes: {e}") from e
