"""
Multi-target solvers. Upward forests are solved natively; downward forests
are reversed and solved with complemented answers.
"""
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from humangs.config.settings import settings
from humangs.core.exceptions import BudgetTooLarge, NoSolverApplicable, TooLarge, WrongStructure
from humangs.core.logging import logger
from humangs.models.plan import Mode, Plan, Structure, Variant
from humangs.services.graph_core import (
    Dag,
    Direction,
    NodeId,
    augment_forest,
    balanced_shape,
    classify,
    forest_components,
    is_down_forest,
    is_up_forest,
    reverse,
    tree_children,
    tree_roots,
)
from humangs.services.semantics import AnswerSet, antichain_masks, antichain_width, wcase_multi

# "no such option" for the best non-full count
NEG = -10 ** 9


def _plan(k: Optional[int], method: str, wcase: int, questions: Iterable[NodeId],
          mode: Mode = Mode.BOUNDED) -> Plan:
    return Plan(variant=Variant.MULTI, mode=mode, k=k, method=method,
                slack=0, wcase=wcase, questions=sorted(questions))


def transform_equivalence(tree: Dag, answers: AnswerSet) -> Tuple[Dag, AnswerSet]:
    """Reverse the graph and complement every answer.

    Multi candidate sets of the two instances agree on every unasked node.
    """
    return reverse(tree), answers.complemented()


@dataclass(frozen=True)
class MultiDpTuple:
    """A non-dominated state of the Multi program for a subtree.

    In a context where no ancestor is marked, p1 is the most nodes the
    adversary can leave as candidates when the whole subtree is marked
    and p2 the most when it is not (NEG if that cannot happen).
    split holds the budget spent in each child subtree.
    """
    split: Tuple[int, ...]
    p1: int
    p2: int
    questions: Tuple[Hashable, ...]

    @property
    def value(self) -> int:
        return max(self.p1, self.p2)


def _plus(a: int, b: int) -> int:
    return NEG if a == NEG or b == NEG else a + b


def _skyline(states: List[MultiDpTuple], prune: bool) -> List[MultiDpTuple]:
    if not prune:
        return states
    kept, best = [], None
    for s in sorted(states, key=lambda s: (s.p1, s.p2, s.questions)):
        if best is None or s.p2 < best:
            kept.append(s)
            best = s.p2
    return kept


def _fold(agg: MultiDpTuple, child: MultiDpTuple, spent: int,
          relabel: Callable[[Tuple[Hashable, ...]], Tuple[Hashable, ...]]) -> MultiDpTuple:
    full = agg.p1 + child.p1
    partial = max(_plus(agg.p2, max(child.p1, child.p2)), _plus(agg.p1, child.p2))
    return MultiDpTuple(agg.split + (spent,), full, max(partial, NEG),
                        tuple(sorted(agg.questions + relabel(child.questions))))


def _close(agg: MultiDpTuple, w: int, label: Hashable, asked: bool, flip: bool) -> MultiDpTuple:
    if not asked:
        return MultiDpTuple(agg.split, w + agg.p1, agg.p2, agg.questions)
    questions = tuple(sorted(agg.questions + (label,)))
    if flip:
        return MultiDpTuple(agg.split, 0, max(agg.p2, w + agg.p1), questions)
    return MultiDpTuple(agg.split, w, max(agg.p1, agg.p2), questions)


def _multi_tables(order: Sequence[Hashable],
                  kids_of: Callable[[Hashable], Sequence[Hashable]],
                  weight_of: Callable[[Hashable], int],
                  label_of: Callable[[Hashable], Optional[Hashable]],
                  relabel_of: Callable[[int], Callable],
                  k: int, flip: bool, prune: bool) -> Dict[Hashable, Dict[int, List[MultiDpTuple]]]:
    """Bottom-up program over any tree shape; order lists children before parents.

    label_of returns None for nodes that cannot be asked. relabel_of(pos)
    maps a child's question labels into its parent's frame.
    """
    tables: Dict[Hashable, Dict[int, List[MultiDpTuple]]] = {}
    for u in order:
        aggs: Dict[int, List[MultiDpTuple]] = {0: [MultiDpTuple((), 0, NEG, ())]}
        for pos, child in enumerate(kids_of(u)):
            relabel = relabel_of(pos)
            merged: Dict[int, List[MultiDpTuple]] = defaultdict(list)
            for b1, left in aggs.items():
                for b2, right in tables[child].items():
                    if b1 + b2 > k:
                        continue
                    merged[b1 + b2].extend(_fold(a, c, b2, relabel) for a in left for c in right)
            aggs = {b: _skyline(group, prune) for b, group in merged.items()}

        label, w = label_of(u), weight_of(u)
        table: Dict[int, List[MultiDpTuple]] = defaultdict(list)
        for b, group in aggs.items():
            for agg in group:
                table[b].append(_close(agg, w, label, False, flip))
                if label is not None and b < k:
                    table[b + 1].append(_close(agg, w, label, True, flip))
        tables[u] = {b: _skyline(group, prune) for b, group in table.items()}
    return tables


def _best(table: Dict[int, List[MultiDpTuple]]) -> MultiDpTuple:
    return min((s for group in table.values() for s in group), key=lambda s: (s.value, s.questions))


def solve_multi_forest(forest: Dag, k: int, prune: bool = True) -> Plan:
    """Exact Multi-Bounded plan for a forest of either orientation"""
    if k < 0:
        raise ValueError(f"Budget must be non-negative, got {k}")
    if is_up_forest(forest):
        upward, flip = forest, False
    elif is_down_forest(forest):
        upward, flip = reverse(forest), True
    else:
        raise WrongStructure("solve_multi_forest needs a downward or upward forest")

    augmented = augment_forest(upward, Direction.UP)
    tree, root = augmented.tree, augmented.virtual_root
    kids = tree_children(tree, Direction.UP)
    tables = _multi_tables(
        order=tree.topological_order,
        kids_of=lambda u: kids[u],
        weight_of=lambda u: 0 if u == root else 1,
        label_of=lambda u: None if u == root else u,
        relabel_of=lambda pos: lambda labels: labels,
        k=min(k, forest.n), flip=flip, prune=prune,
    )
    best = _best(tables[root])
    per_tree = {upward.names[r]: spent for r, spent in zip(upward.sinks(), best.split)}
    logger.info(f"Multi forest plan: {len(best.questions)} questions, wcase {best.value}, flip={flip}, "
                f"budget per tree {per_tree}")
    return _plan(k, "multi-forest", best.value, best.questions)


def _level_table(m: int, d: int, k: int, flip: bool) -> Dict[int, List[MultiDpTuple]]:
    """Root table of a complete m-ary tree where every node at a depth is alike.

    Question labels are child-position paths from the root.
    """
    tables = _multi_tables(
        order=list(range(d, -1, -1)),
        kids_of=lambda depth: [depth + 1] * m if depth < d else [],
        weight_of=lambda depth: 1,
        label_of=lambda depth: (),
        relabel_of=lambda pos: lambda paths: tuple((pos,) + p for p in paths),
        k=k, flip=flip, prune=True,
    )
    return tables[0]


def _expand(kids: Sequence[Sequence[int]], root: NodeId, paths: Iterable[Tuple[int, ...]]) -> List[NodeId]:
    out = []
    for path in paths:
        u = root
        for pos in path:
            u = kids[u][pos]
        out.append(u)
    return out


def _balanced_orientation(tree: Dag) -> Tuple[Direction, bool]:
    if is_down_forest(tree):
        return Direction.DOWN, True
    if is_up_forest(tree):
        return Direction.UP, False
    raise WrongStructure("Expected a downward or upward forest of complete trees")


def solve_multi_balanced_tree(tree: Dag, k: int) -> Plan:
    """Exact Multi plan for one complete m-ary tree, one program state per depth"""
    shape = classify(tree)
    if not shape.is_balanced:
        raise WrongStructure(f"Expected a complete m-ary tree, got {shape.tag.value}")
    if k * k > shape.m ** shape.d:
        raise BudgetTooLarge(f"Level program needs k^2 <= m^d, got k={k}, m={shape.m}, d={shape.d}")
    direction, flip = _balanced_orientation(tree)
    best = _best(_level_table(shape.m, shape.d, min(k, tree.n), flip))
    root = tree_roots(tree, direction)[0]
    questions = _expand(tree_children(tree, direction), root, best.questions)
    return _plan(k, "multi-balanced-tree", best.value, questions)


def solve_multi_balanced_forest(forest: Dag, k: int) -> Plan:
    """Exact Multi plan for a forest of complete trees: per-tree tables, then a knapsack on budget"""
    if k < 0:
        raise ValueError(f"Budget must be non-negative, got {k}")
    direction, flip = _balanced_orientation(forest)
    kids = tree_children(forest, direction)
    roots = tree_roots(forest, direction)

    per_tree: List[List[Tuple[int, Tuple]]] = []
    for root in roots:
        shape = balanced_shape(kids, root)
        if shape is None:
            raise WrongStructure(f"Tree rooted at {forest.names[root]} is not a complete m-ary tree")
        table = _level_table(shape[0], shape[1], k, flip)
        # best[b]: the best state using at most b questions
        best, running = [], None
        for b in range(k + 1):
            for s in table.get(b, []):
                if running is None or (s.value, s.questions) < (running.value, running.questions):
                    running = s
            best.append((running.value, running.questions))
        per_tree.append(best)

    # total[b] = (sum of per-tree worst cases, choice per tree)
    total: List[Tuple[int, Tuple[int, ...]]] = [(0, ())] * (k + 1)
    for best in per_tree:
        total = [
            min(((total[b - spent][0] + best[spent][0], total[b - spent][1] + (spent,)) for spent in range(b + 1)),
                key=lambda x: x[0])
            for b in range(k + 1)
        ]
    wcase, split = total[k]
    questions: List[NodeId] = []
    for root, best, spent in zip(roots, per_tree, split):
        questions.extend(_expand(kids, root, best[spent][1]))
    logger.info(f"Multi balanced forest: {len(roots)} trees, budget split {split}, wcase {wcase}")
    return _plan(k, "multi-balanced-forest", wcase, questions)


def brute_force_multi(dag: Dag, k: int) -> Plan:
    """Exhaustive Multi-Bounded search for small DAGs"""
    if k < 0:
        raise ValueError(f"Budget must be non-negative, got {k}")
    size = min(k, dag.n)
    if dag.n > settings.MULTI_BRUTE_FORCE_MAX_NODES or size > settings.MULTI_BRUTE_FORCE_MAX_K:
        raise TooLarge(f"Multi brute force is limited to n <= {settings.MULTI_BRUTE_FORCE_MAX_NODES}, "
                       f"k <= {settings.MULTI_BRUTE_FORCE_MAX_K}; got n={dag.n}, k={size}")
    antichains = antichain_masks(dag)
    floor = antichain_width(dag)
    best_wcase, best = dag.n + 1, ()
    for questions in combinations(range(dag.n), size):
        value = wcase_multi(dag, questions, antichains)
        if value < best_wcase:
            best_wcase, best = value, questions
            if value == floor:
                break
    return _plan(k, "multi-brute-force", best_wcase, best)


def solve_multi_unlimited(dag: Dag) -> Plan:
    """Ask every node; the worst case is then the antichain width"""
    return _plan(None, "multi-unlimited", antichain_width(dag), range(dag.n), mode=Mode.UNLIMITED)


def _all_trees_balanced(forest: Dag, direction: Direction) -> bool:
    kids = tree_children(forest, direction)
    return all(balanced_shape(kids, root) is not None for root in tree_roots(forest, direction))


def solve_multi(dag: Dag, k: int, structure: Structure = Structure.AUTO) -> Plan:
    """Multi-Bounded dispatcher"""
    if structure in (Structure.DOWN_FOREST, Structure.UP_FOREST):
        return solve_multi_forest(dag, k)
    if structure is Structure.AUTO:
        shape = classify(dag)
        if shape.is_balanced and shape.m >= 2 and k * k <= shape.m ** shape.d:
            return solve_multi_balanced_tree(dag, k)
        if shape.is_down or shape.is_up:
            direction = Direction.DOWN if shape.is_down else Direction.UP
            if len(forest_components(dag, direction)) > 1 and _all_trees_balanced(dag, direction):
                return solve_multi_balanced_forest(dag, k)
            return solve_multi_forest(dag, k)
    try:
        return brute_force_multi(dag, k)
    except TooLarge as e:
        raise NoSolverApplicable(f"General DAG with {dag.n} nodes: {e}") from e
