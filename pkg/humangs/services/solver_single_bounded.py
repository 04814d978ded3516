"""
Single-target, bounded-budget solvers: exhaustive search for small DAGs,
tree partitioning for downward forests, a dynamic program for upward
forests, and closed forms for complete m-ary trees.
"""
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from humangs.config.settings import settings
from humangs.core.exceptions import (
    BudgetTooLarge,
    NoSolverApplicable,
    TooLarge,
    WrongStructure,
)
from humangs.core.logging import logger
from humangs.models.plan import Mode, Plan, Structure, Variant
from humangs.services.graph_core import (
    Dag,
    Direction,
    NodeId,
    StructureTag,
    augment_forest,
    classify,
    is_down_forest,
    is_up_forest,
    tree_children,
)
from humangs.services.semantics import wcase_single


def _check_budget(k: int) -> None:
    if k < 0:
        raise ValueError(f"Budget must be non-negative, got {k}")


def _plan(k: int, method: str, wcase: int, questions: Iterable[NodeId]) -> Plan:
    return Plan(variant=Variant.SINGLE, mode=Mode.BOUNDED, k=k, method=method,
                slack=0, wcase=wcase, questions=sorted(questions))


def brute_force(dag: Dag, k: int, max_nodes: Optional[int] = None, max_work: Optional[int] = None) -> Plan:
    """Try every question set of size min(k, n); first strict improvement wins"""
    _check_budget(k)
    max_nodes = settings.BRUTE_FORCE_MAX_NODES if max_nodes is None else max_nodes
    max_work = settings.BRUTE_FORCE_MAX_WORK if max_work is None else max_work
    size = min(k, dag.n)
    work = comb(dag.n, size) * dag.n * dag.n * size
    if dag.n > max_nodes or work > max_work:
        raise TooLarge(f"Brute force over {dag.n} nodes with k={size} exceeds the configured limit")

    best_wcase, best = dag.n + 1, ()
    for questions in combinations(range(dag.n), size):
        value = wcase_single(dag, questions)
        if value < best_wcase:
            best_wcase, best = value, questions
            if value == 1:
                break
    logger.debug(f"Brute force picked {best} with wcase {best_wcase}")
    return _plan(k, "brute-force", best_wcase, best)


# Downward forests


@dataclass(frozen=True)
class Partitioning:
    """Blocks induced by a question set on a downward forest.

    owners[i] is the asked node owning blocks[i], or None for the block of
    nodes with no asked ancestor.
    """
    blocks: Tuple[FrozenSet[NodeId], ...]
    owners: Tuple[Optional[NodeId], ...]


def _owners(forest: Dag, asked: set) -> List[Optional[NodeId]]:
    owner: List[Optional[NodeId]] = [None] * forest.n
    for u in forest.topological_order:
        if u in asked:
            owner[u] = u
        elif forest.parents[u]:
            owner[u] = owner[forest.parents[u][0]]
    return owner


def partitioning(forest: Dag, questions: Iterable[NodeId]) -> Partitioning:
    if not is_down_forest(forest):
        raise WrongStructure("partitioning needs a downward forest")
    groups: Dict[Optional[NodeId], List[NodeId]] = defaultdict(list)
    for u, owner in enumerate(_owners(forest, set(questions))):
        groups[owner].append(u)
    keys = sorted(groups, key=lambda o: -1 if o is None else o)
    return Partitioning(blocks=tuple(frozenset(groups[o]) for o in keys), owners=tuple(keys))


def down_forest_wcase(forest: Dag, questions: Iterable[NodeId]) -> int:
    """Largest block of the partition, linear time"""
    return max(Counter(_owners(forest, set(questions))).values())


def _greedy_cuts(kids: Sequence[Sequence[int]], weight: Sequence[int], order: Sequence[int],
                 bound: int, limit: Optional[int] = None) -> Optional[List[NodeId]]:
    """Bottom-up greedy: while a component exceeds bound, cut its heaviest child.

    Returns the cut children, or None once more than limit cuts are needed.
    """
    load = [0] * len(weight)
    cuts: List[NodeId] = []
    for u in order:
        below = kids[u]
        total = weight[u]
        for c in below:
            total += load[c]
        if total > bound:
            for c in sorted(below, key=lambda c: (-load[c], c)):
                total -= load[c]
                cuts.append(c)
                if total <= bound:
                    break
            if limit is not None and len(cuts) > limit:
                return None
        load[u] = total
    return cuts


def solve_down_forest(forest: Dag, k: int) -> Plan:
    """Optimal plan for a downward forest by min-max tree partitioning"""
    _check_budget(k)
    if not is_down_forest(forest):
        raise WrongStructure("solve_down_forest needs a downward forest")
    n, budget = forest.n, min(k, forest.n)

    augmented = augment_forest(forest, Direction.DOWN)
    tree = augmented.tree
    weight = [1] * n + [0]
    order = tuple(reversed(tree.topological_order))

    lo, hi = max(1, ceil(n / (budget + 1))), n
    while lo < hi:
        mid = (lo + hi) // 2
        if _greedy_cuts(tree.children, weight, order, mid, limit=budget) is not None:
            hi = mid
        else:
            lo = mid + 1

    questions = _greedy_cuts(tree.children, weight, order, lo)
    wcase = down_forest_wcase(forest, questions)
    logger.info(f"Down-forest plan: {len(questions)} questions, wcase {wcase} (bound {lo})")
    return _plan(k, "down-forest", wcase, questions)


# Upward forests


@dataclass(frozen=True)
class DpTuple:
    """A non-dominated state of a subtree in the upward-forest program.

    p1 is the open class through the subtree root, which is also what the
    subtree adds to a class above it. p2 is the largest class already
    closed inside the subtree, n_out the nodes whose own subtree holds no
    question. split records the budget each child got, so at the virtual
    root it is the per-tree budget.
    """
    split: Tuple[int, ...]
    p1: int
    p2: int
    n_out: int
    questions: Tuple[NodeId, ...]

    @property
    def value(self) -> int:
        return max(self.p1, self.p2, self.n_out)


@dataclass(frozen=True)
class _Fold:
    active: int  # children with a question below: 0, 1, or 2 meaning two or more
    chain: int
    closed: int
    n_out: int
    split: Tuple[int, ...]
    questions: Tuple[NodeId, ...]


def up_forest_wcase(forest: Dag, questions: Iterable[NodeId]) -> int:
    """Largest class for an upward forest, linear time.

    A node's class is fixed by the asked nodes in its tree-subtree: nodes
    with none share one class, the rest inherit the class of their only
    active child or start a new one.
    """
    asked = set(questions)
    label: Dict[NodeId, Optional[NodeId]] = {}
    sizes: Counter = Counter()
    for u in forest.topological_order:
        below = [label[v] for v in forest.parents[u] if label[v] is not None]
        if u in asked or len(below) >= 2:
            label[u] = u
        elif below:
            label[u] = below[0]
        else:
            label[u] = None
        sizes[label[u]] += 1
    return max(sizes.values())


def _skyline(states: List, key, prune: bool) -> List:
    """2-D staircase on key = (first, second); ties keep the smaller question tuple"""
    if not prune:
        return states
    kept, best_second = [], None
    for s in sorted(states, key=lambda s: (*key(s), s.questions)):
        _, second = key(s)
        if best_second is None or second < best_second:
            kept.append(s)
            best_second = second
    return kept


def _merge(fold: _Fold, state: DpTuple, spent: int, cap: int) -> Optional[_Fold]:
    n_out = fold.n_out + state.n_out
    if not state.questions:
        active, chain, closed = fold.active, fold.chain, fold.closed
    elif fold.active == 0:
        active, chain, closed = 1, state.p1, max(fold.closed, state.p2)
    elif fold.active == 1:
        active, chain, closed = 2, 0, max(fold.closed, state.p2, fold.chain, state.p1)
    else:
        active, chain, closed = 2, 0, max(fold.closed, state.p2, state.p1)
    if n_out > cap or closed > cap:
        return None
    return _Fold(active, chain, closed, n_out, fold.split + (spent,),
                 tuple(sorted(fold.questions + state.questions)))


def _close(fold: _Fold, u: NodeId, w: int, asked: bool) -> DpTuple:
    if asked:
        return DpTuple(fold.split, w, max(fold.closed, fold.chain), fold.n_out,
                       tuple(sorted(fold.questions + (u,))))
    if fold.active == 0:
        return DpTuple(fold.split, 0, fold.closed, fold.n_out + w, fold.questions)
    if fold.active == 1:
        return DpTuple(fold.split, fold.chain + w, fold.closed, fold.n_out, fold.questions)
    return DpTuple(fold.split, w, fold.closed, fold.n_out, fold.questions)


def _up_tables(tree: Dag, root: NodeId, k: int, cap: int, prune: bool) -> Dict[int, List[DpTuple]]:
    """Root table of the capped program: states whose classes all fit in cap"""
    kids = tree_children(tree, Direction.UP)
    tables: Dict[NodeId, Dict[int, List[DpTuple]]] = {}
    for u in tree.topological_order:
        folds: Dict[int, List[_Fold]] = {0: [_Fold(0, 0, 0, 0, (), ())]}
        for child in kids[u]:
            merged: Dict[int, List[_Fold]] = defaultdict(list)
            for b1, left in folds.items():
                for b2, right in tables[child].items():
                    if b1 + b2 > k:
                        continue
                    for fold in left:
                        for state in right:
                            out = _merge(fold, state, b2, cap)
                            if out is not None:
                                merged[b1 + b2].append(out)
            folds = {}
            for b, group in merged.items():
                by_active: Dict[int, List[_Fold]] = defaultdict(list)
                for fold in group:
                    by_active[fold.active].append(fold)
                folds[b] = [f for part in by_active.values()
                            for f in _skyline(part, lambda f: (f.n_out, f.chain), prune)]
            del tables[child]

        w = 0 if u == root else 1
        table: Dict[int, List[DpTuple]] = defaultdict(list)
        for b, group in folds.items():
            for fold in group:
                for asked in ((False, True) if u != root and b < k else (False,)):
                    state = _close(fold, u, w, asked)
                    if state.n_out <= cap and state.p1 <= cap and state.p2 <= cap:
                        table[b + asked].append(state)
        tables[u] = {b: _skyline(group, lambda s: (s.n_out, s.p1), prune) for b, group in table.items()}
    return tables[root]


def solve_up_forest(forest: Dag, k: int, prune: bool = True) -> Plan:
    """Optimal plan for an upward forest.

    The forest is joined under a weight-0, unaskable virtual root and a
    capped program decides whether every class can be kept within a bound;
    the smallest feasible bound is found by bisection.
    """
    _check_budget(k)
    if not is_up_forest(forest):
        raise WrongStructure("solve_up_forest needs an upward forest")
    budget = min(k, forest.n)
    augmented = augment_forest(forest, Direction.UP)

    def best_at(cap: int) -> Optional[DpTuple]:
        table = _up_tables(augmented.tree, augmented.virtual_root, budget, cap, prune)
        states = [s for group in table.values() for s in group if s.value <= cap]
        return min(states, key=lambda s: (s.value, s.questions), default=None)

    lo, hi = 1, forest.n
    while lo < hi:
        mid = (lo + hi) // 2
        if best_at(mid) is not None:
            hi = mid
        else:
            lo = mid + 1

    best = best_at(lo)
    per_tree = {forest.names[r]: spent for r, spent in zip(forest.sinks(), best.split)}
    logger.info(f"Up-forest plan: {len(best.questions)} questions, wcase {best.value}, budget per tree {per_tree}")
    return _plan(k, "up-forest", up_forest_wcase(forest, best.questions), best.questions)


# Complete m-ary trees


def _tree_shape(tree: Dag, tag: StructureTag) -> Tuple[int, int]:
    shape = classify(tree)
    if shape.tag is not tag or shape.m < 2:
        raise WrongStructure(f"Expected a complete m-ary tree ({tag.value}) with m >= 2, got {shape.tag.value}")
    return shape.m, shape.d


def _level_cuts(m: int, d: int, bound: int) -> Tuple[List[int], List[int], int]:
    """Greedy cuts per depth when every node at a depth behaves alike"""
    cut, load = [0] * (d + 1), [0] * (d + 2)
    for depth in range(d, -1, -1):
        total = 1 if depth == d else 1 + m * load[depth + 1]
        while total > bound:
            total -= load[depth + 1]
            cut[depth] += 1
        load[depth] = total
    return cut, load, sum(cut[depth] * m ** depth for depth in range(d + 1))


def solve_balanced_down(tree: Dag, k: int) -> Plan:
    """Optimal plan for a complete m-ary downward tree in closed form"""
    _check_budget(k)
    m, d = _tree_shape(tree, StructureTag.BALANCED_DOWN_TREE)
    if k * k > m ** d:
        raise BudgetTooLarge(f"Closed form for a complete tree needs k^2 <= m^d, got k={k}, m={m}, d={d}")

    lo, hi = max(1, ceil(tree.n / (k + 1))), tree.n
    while lo < hi:
        mid = (lo + hi) // 2
        if _level_cuts(m, d, mid)[2] <= k:
            hi = mid
        else:
            lo = mid + 1
    cut, load, _ = _level_cuts(m, d, lo)

    questions, frontier = [], [tree.roots()[0]]
    for depth in range(d):
        questions.extend(c for u in frontier for c in tree.children[u][:cut[depth]])
        frontier = [c for u in frontier for c in tree.children[u]]
    wcase = max([load[0]] + [load[depth + 1] for depth in range(d) if cut[depth]])
    return _plan(k, "balanced-down", wcase, questions)


def balanced_up_applies(n: int, k: int, d: int) -> bool:
    """Regime where spreading k leaves is optimal: the empty class dominates"""
    return n - k * (d + 1) >= d + 1


def solve_balanced_up(tree: Dag, k: int) -> Plan:
    """Ask k leaves spread over distinct subtrees at the shallowest depth that fits k"""
    _check_budget(k)
    m, d = _tree_shape(tree, StructureTag.BALANCED_UP_TREE)
    k_eff = min(k, m ** d)
    alpha = 0
    while m ** alpha < k_eff:
        alpha += 1

    kids = tree_children(tree, Direction.UP)
    root = tree.sinks()[0]
    questions = []
    for i in range(k_eff):
        u = root
        for depth in range(d):
            digit = (i // m ** depth) % m if depth < alpha else 0
            u = kids[u][digit]
        questions.append(u)
    return _plan(k, "balanced-up", up_forest_wcase(tree, questions), questions)


def solve(dag: Dag, k: int, structure: Structure = Structure.AUTO) -> Plan:
    """Single-Bounded dispatcher: classify, then use the most specific exact solver"""
    _check_budget(k)
    if structure is Structure.DOWN_FOREST:
        return solve_down_forest(dag, k)
    if structure is Structure.UP_FOREST:
        return solve_up_forest(dag, k)
    if structure is Structure.DAG:
        return _brute_or_fail(dag, k)

    shape = classify(dag)
    logger.debug(f"Classified {dag!r} as {shape}")
    if shape.tag is StructureTag.BALANCED_DOWN_TREE and shape.m >= 2 and k * k <= shape.m ** shape.d:
        return solve_balanced_down(dag, k)
    if shape.is_down:
        return solve_down_forest(dag, k)
    if shape.tag is StructureTag.BALANCED_UP_TREE and shape.m >= 2 and balanced_up_applies(dag.n, k, shape.d):
        return solve_balanced_up(dag, k)
    if shape.is_up:
        return solve_up_forest(dag, k)
    return _brute_or_fail(dag, k)


def _brute_or_fail(dag: Dag, k: int) -> Plan:
    try:
        return brute_force(dag, k)
    except TooLarge as e:
        raise NoSolverApplicable(f"General DAG with {dag.n} nodes: {e}") from e
