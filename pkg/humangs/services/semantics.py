"""
Question/answer semantics: independence, simulated answers, candidate sets,
consistency and the worst-case candidate size of a question set.
"""
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

import networkx as nx

from humangs.config.settings import settings
from humangs.core.exceptions import InconsistentAnswers, InvalidTargetSet, TooLarge
from humangs.core.logging import logger
from humangs.models.plan import Variant
from humangs.services.graph_core import (
    Dag,
    NodeId,
    bits_of,
    is_down_forest,
    is_up_forest,
    iter_bits,
)


class Reply(str, Enum):
    YES = "YES"
    NO = "NO"

    def complement(self) -> "Reply":
        return Reply.NO if self is Reply.YES else Reply.YES


@dataclass(frozen=True)
class TargetSet:
    nodes: FrozenSet[NodeId]

    @property
    def mask(self) -> int:
        return bits_of(self.nodes)


@dataclass
class AnswerSet:
    """Replies keyed by asked node"""
    answers: Dict[NodeId, Reply] = field(default_factory=dict)

    @property
    def questions(self) -> FrozenSet[NodeId]:
        return frozenset(self.answers)

    @property
    def yes_mask(self) -> int:
        return bits_of(u for u, r in self.answers.items() if r is Reply.YES)

    @property
    def no_mask(self) -> int:
        return bits_of(u for u, r in self.answers.items() if r is Reply.NO)

    def complemented(self) -> "AnswerSet":
        return AnswerSet({u: r.complement() for u, r in self.answers.items()})


def ip(dag: Dag, nodes: Iterable[NodeId]) -> bool:
    """True iff no node of the set reaches another"""
    mask = bits_of(nodes)
    return all(dag.reach[u] & mask == 1 << u for u in iter_bits(mask))


def make_targets(dag: Dag, nodes: Iterable[NodeId], variant: Variant) -> TargetSet:
    chosen = frozenset(nodes)
    if not chosen:
        raise InvalidTargetSet("Target set is empty")
    if any(u < 0 or u >= dag.n for u in chosen):
        raise InvalidTargetSet(f"Target set has nodes outside the graph: {sorted(chosen)}")
    if variant is Variant.SINGLE and len(chosen) != 1:
        raise InvalidTargetSet("Single variant takes exactly one target")
    if not ip(dag, chosen):
        raise InvalidTargetSet("Targets must be pairwise unreachable from each other")
    return TargetSet(chosen)


def ask(dag: Dag, targets: TargetSet, u: NodeId) -> Reply:
    """YES iff some target is reachable from u"""
    return Reply.YES if dag.reach[u] & targets.mask else Reply.NO


def simulate(dag: Dag, targets: TargetSet, questions: Iterable[NodeId]) -> AnswerSet:
    return AnswerSet({u: ask(dag, targets, u) for u in questions})


def _one_bits(dag: Dag, u: NodeId, reply: Reply, variant: Variant) -> int:
    if reply is Reply.NO:
        return dag.full_mask & ~dag.reach[u]
    if variant is Variant.MULTI:
        return dag.full_mask & ~dag.pset_bits(u)
    return dag.reach[u]


def candidate_one(dag: Dag, u: NodeId, reply: Reply, variant: Variant) -> FrozenSet[NodeId]:
    return frozenset(iter_bits(_one_bits(dag, u, reply, variant)))


def intersect_candidates(dag: Dag, answers: AnswerSet, variant: Variant) -> FrozenSet[NodeId]:
    """Plain intersection of per-answer candidates, no consistency checks"""
    bits = dag.full_mask
    for u, reply in answers.answers.items():
        bits &= _one_bits(dag, u, reply, variant)
    return frozenset(iter_bits(bits))


def check_consistency(dag: Dag, answers: AnswerSet) -> bool:
    """No YES-answered node may have a NO-answered strict ancestor"""
    no = answers.no_mask
    return all(not dag.pset_bits(u) & no for u in iter_bits(answers.yes_mask))


def candidate_set(dag: Dag, answers: AnswerSet, variant: Variant) -> FrozenSet[NodeId]:
    if not check_consistency(dag, answers):
        raise InconsistentAnswers("A node answered YES has an ancestor answered NO")
    cand = intersect_candidates(dag, answers, variant)
    if not cand:
        raise InconsistentAnswers("No node is consistent with the answers")
    return cand


def wcase_single(dag: Dag, questions: Iterable[NodeId]) -> int:
    """Largest candidate set over single targets.

    Two targets share a candidate set exactly when they are reached by the
    same asked nodes, so the worst case is the largest such group.
    """
    asked = bits_of(questions)
    if not asked:
        return dag.n
    groups = Counter(dag.reached_by[t] & asked for t in range(dag.n))
    return max(groups.values())


def antichain_masks(dag: Dag, limit: Optional[int] = None) -> List[int]:
    """Every non-empty antichain as a bitset"""
    limit = settings.ANTICHAIN_ENUMERATION_LIMIT if limit is None else limit
    if dag.n > limit:
        raise TooLarge(f"Antichain enumeration is limited to {limit} nodes, graph has {dag.n}")
    comparable = [dag.reach[u] | dag.reached_by[u] for u in range(dag.n)]
    found: List[int] = []

    def extend(start: int, chosen: int, blocked: int) -> None:
        for u in range(start, dag.n):
            if not (blocked >> u) & 1:
                mask = chosen | (1 << u)
                found.append(mask)
                extend(u + 1, mask, blocked | comparable[u])

    extend(0, 0, 0)
    return found


def wcase_multi(dag: Dag, questions: Iterable[NodeId], antichains: Optional[Sequence[int]] = None) -> int:
    """Largest Multi candidate set over every independent target set"""
    asked = sorted(set(questions))
    if antichains is None:
        antichains = antichain_masks(dag)
    full = dag.full_mask
    keep_yes = {u: full & ~dag.pset_bits(u) for u in asked}
    keep_no = {u: full & ~dag.reach[u] for u in asked}
    worst = 0
    for targets in antichains:
        bits = full
        for u in asked:
            bits &= keep_yes[u] if dag.reach[u] & targets else keep_no[u]
        worst = max(worst, bits.bit_count())
    return worst


def antichain_width(dag: Dag) -> int:
    """Size of a largest antichain"""
    if is_down_forest(dag):
        return len(dag.sinks())
    if is_up_forest(dag):
        return len(dag.roots())

    # Dilworth: width = n - maximum matching in the comparability split graph
    split = nx.Graph()
    left = [("out", u) for u in range(dag.n)]
    split.add_nodes_from(left)
    split.add_nodes_from(("in", v) for v in range(dag.n))
    for u in range(dag.n):
        for v in iter_bits(dag.reach[u] & ~(1 << u)):
            split.add_edge(("out", u), ("in", v))
    matching = nx.bipartite.hopcroft_karp_matching(split, top_nodes=left)
    width = dag.n - len(matching) // 2
    logger.debug(f"Antichain width {width} via matching on {dag!r}")
    return width
