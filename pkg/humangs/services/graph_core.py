"""
Graph representation, reachability, structural classification and the
forest/reversal transformations shared by every solver.
"""
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from humangs.core.exceptions import (
    CycleDetected,
    DuplicateNode,
    EmptyCandidateSet,
    EmptyGraph,
    UnknownNode,
    WrongStructure,
)
from humangs.core.logging import logger

NodeId = int


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the positions of the set bits of an int bitset, ascending"""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bits_of(nodes: Iterable[int]) -> int:
    mask = 0
    for u in nodes:
        mask |= 1 << u
    return mask


class Dag:
    """Immutable DAG with dense node indices assigned in declaration order.

    ``children[u]`` and ``parents[u]`` are ascending index tuples. The
    reachability index is built lazily the first time it is needed: tree
    solvers on very large inputs never pay for it.
    """

    def __init__(self, names: Sequence[str], children: Sequence[Iterable[int]],
                 topological_order: Optional[Sequence[int]] = None):
        self.names: Tuple[str, ...] = tuple(names)
        self.n = len(self.names)
        self.children: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(set(kids))) for kids in children)
        parents: List[List[int]] = [[] for _ in range(self.n)]
        for u, kids in enumerate(self.children):
            for v in kids:
                parents[v].append(u)
        self.parents: Tuple[Tuple[int, ...], ...] = tuple(tuple(p) for p in parents)
        self._index: Dict[str, int] = {name: i for i, name in enumerate(self.names)}
        if topological_order is None:
            topological_order = self._sort_topologically()
        self.topological_order: Tuple[int, ...] = tuple(topological_order)

    def _sort_topologically(self) -> Tuple[int, ...]:
        graph = self.to_networkx()
        try:
            return tuple(nx.topological_sort(graph))
        except nx.NetworkXUnfeasible:
            cycle = nx.find_cycle(graph)
            path = " -> ".join(self.names[u] for u, _ in cycle)
            raise CycleDetected(f"Graph contains a cycle: {path} -> {self.names[cycle[0][0]]}")

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    @cached_property
    def reach(self) -> Tuple[int, ...]:
        """reach[u] has bit v set iff v is in rset(u)"""
        reach = [0] * self.n
        for u in reversed(self.topological_order):
            bits = 1 << u
            for v in self.children[u]:
                bits |= reach[v]
            reach[u] = bits
        return tuple(reach)

    @cached_property
    def reached_by(self) -> Tuple[int, ...]:
        """reached_by[u] has bit v set iff u is in rset(v)"""
        reached = [0] * self.n
        for u in self.topological_order:
            bits = 1 << u
            for v in self.parents[u]:
                bits |= reached[v]
            reached[u] = bits
        return tuple(reached)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def reaches(self, a: NodeId, b: NodeId) -> bool:
        return (self.reach[a] >> b) & 1 == 1

    def pset_bits(self, u: NodeId) -> int:
        return self.reached_by[u] & ~(1 << u)

    def index_of(self, name: str) -> NodeId:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNode(f"Unknown node: {name}")

    def names_of(self, nodes: Iterable[NodeId]) -> List[str]:
        """Names of the given nodes, sorted"""
        return sorted(self.names[u] for u in nodes)

    def edges(self) -> Iterator[Tuple[NodeId, NodeId]]:
        for u, kids in enumerate(self.children):
            for v in kids:
                yield u, v

    def roots(self) -> List[NodeId]:
        return [u for u in range(self.n) if not self.parents[u]]

    def sinks(self) -> List[NodeId]:
        return [u for u in range(self.n) if not self.children[u]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.names == other.names and self.children == other.children

    def __hash__(self) -> int:
        return hash((self.names, self.children))

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={sum(len(c) for c in self.children)})"


def build_dag(nodes: Iterable[str], edges: Iterable[Tuple[str, str]]) -> Dag:
    """Build a Dag from node names and (src, dst) name pairs"""
    index: Dict[str, int] = {}
    for name in nodes:
        if name in index:
            raise DuplicateNode(f"Duplicate node: {name}")
        index[name] = len(index)
    if not index:
        raise EmptyGraph("Graph has no nodes")

    children: List[set] = [set() for _ in index]
    for src, dst in edges:
        for endpoint in (src, dst):
            if endpoint not in index:
                raise UnknownNode(f"Edge {src} -> {dst} references undeclared node {endpoint}")
        children[index[src]].add(index[dst])

    dag = Dag(list(index), children)
    logger.debug(f"Built {dag!r}")
    return dag


def rset(dag: Dag, u: NodeId) -> FrozenSet[NodeId]:
    return frozenset(iter_bits(dag.reach[u]))


def pset(dag: Dag, u: NodeId) -> FrozenSet[NodeId]:
    return frozenset(iter_bits(dag.pset_bits(u)))


class Direction(str, Enum):
    DOWN = "down"
    UP = "up"


class StructureTag(str, Enum):
    GENERAL_DAG = "GeneralDag"
    DOWNWARD_FOREST = "DownwardForest"
    UPWARD_FOREST = "UpwardForest"
    BALANCED_DOWN_TREE = "BalancedDownTree"
    BALANCED_UP_TREE = "BalancedUpTree"


@dataclass(frozen=True)
class StructureClass:
    tag: StructureTag
    m: int = 0
    d: int = 0

    @property
    def is_down(self) -> bool:
        return self.tag in (StructureTag.DOWNWARD_FOREST, StructureTag.BALANCED_DOWN_TREE)

    @property
    def is_up(self) -> bool:
        return self.tag in (StructureTag.UPWARD_FOREST, StructureTag.BALANCED_UP_TREE)

    @property
    def is_balanced(self) -> bool:
        return self.tag in (StructureTag.BALANCED_DOWN_TREE, StructureTag.BALANCED_UP_TREE)


def is_down_forest(dag: Dag) -> bool:
    return all(len(p) <= 1 for p in dag.parents)


def is_up_forest(dag: Dag) -> bool:
    return all(len(c) <= 1 for c in dag.children)


def tree_children(dag: Dag, direction: Direction) -> Tuple[Tuple[int, ...], ...]:
    """Children in the tree sense: successors for downward, predecessors for upward"""
    return dag.children if direction is Direction.DOWN else dag.parents


def tree_roots(dag: Dag, direction: Direction) -> List[NodeId]:
    return dag.roots() if direction is Direction.DOWN else dag.sinks()


def balanced_shape(kids: Sequence[Sequence[int]], root: NodeId) -> Optional[Tuple[int, int]]:
    """(m, d) if the tree under root is complete m-ary with all leaves at depth d"""
    arity: Optional[int] = None
    leaf_depth: Optional[int] = None
    queue = deque([(root, 0)])
    while queue:
        u, depth = queue.popleft()
        if not kids[u]:
            if leaf_depth is None:
                leaf_depth = depth
            elif leaf_depth != depth:
                return None
            continue
        if arity is None:
            arity = len(kids[u])
        elif arity != len(kids[u]):
            return None
        queue.extend((v, depth + 1) for v in kids[u])
    return (arity or 0, leaf_depth or 0)


def classify(dag: Dag) -> StructureClass:
    """Most specific structure class; downward wins when both forest classes apply"""
    for direction, forest_test in ((Direction.DOWN, is_down_forest), (Direction.UP, is_up_forest)):
        if not forest_test(dag):
            continue
        roots = tree_roots(dag, direction)
        shape = balanced_shape(tree_children(dag, direction), roots[0]) if len(roots) == 1 else None
        if direction is Direction.DOWN:
            if shape:
                return StructureClass(StructureTag.BALANCED_DOWN_TREE, *shape)
            return StructureClass(StructureTag.DOWNWARD_FOREST)
        if shape:
            return StructureClass(StructureTag.BALANCED_UP_TREE, *shape)
        return StructureClass(StructureTag.UPWARD_FOREST)
    return StructureClass(StructureTag.GENERAL_DAG)


@dataclass(frozen=True)
class AugmentedTree:
    tree: Dag
    virtual_root: NodeId
    origin_map: Dict[NodeId, NodeId] = field(default_factory=dict)


def _fresh_name(dag: Dag, base: str) -> str:
    name, suffix = base, 0
    while name in dag._index:
        suffix += 1
        name = f"{base}{suffix}"
    return name


def augment_forest(forest: Dag, direction: Direction) -> AugmentedTree:
    """Join the trees of a forest under a virtual root appended as index n"""
    if direction is Direction.DOWN and not is_down_forest(forest):
        raise WrongStructure("augment_forest(down) needs a downward forest")
    if direction is Direction.UP and not is_up_forest(forest):
        raise WrongStructure("augment_forest(up) needs an upward forest")

    root = forest.n
    children = [list(kids) for kids in forest.children]
    if direction is Direction.DOWN:
        children.append(forest.roots())
        order = (root,) + forest.topological_order
    else:
        for r in forest.sinks():
            children[r].append(root)
        children.append([])
        order = forest.topological_order + (root,)

    tree = Dag(forest.names + (_fresh_name(forest, "__root__"),), children, topological_order=order)
    return AugmentedTree(tree=tree, virtual_root=root, origin_map={u: u for u in range(forest.n)})


def reverse(dag: Dag) -> Dag:
    return Dag(dag.names, dag.parents, topological_order=tuple(reversed(dag.topological_order)))


def forest_components(dag: Dag, direction: Direction) -> List[List[NodeId]]:
    """Node lists of the trees of a forest, in root order"""
    kids = tree_children(dag, direction)
    components = []
    for root in tree_roots(dag, direction):
        members, queue = [], deque([root])
        while queue:
            u = queue.popleft()
            members.append(u)
            queue.extend(kids[u])
        components.append(sorted(members))
    return components


def _nearest_member_parent(dag: Dag, members: set, direction: Direction) -> Dict[NodeId, Optional[NodeId]]:
    """For forests: closest proper tree-ancestor of each member that is itself a member"""
    up = dag.parents if direction is Direction.DOWN else dag.children
    order = dag.topological_order if direction is Direction.DOWN else tuple(reversed(dag.topological_order))
    nearest: Dict[NodeId, Optional[NodeId]] = {}
    for u in order:
        above = up[u][0] if up[u] else None
        if above is None:
            nearest[u] = None
        else:
            nearest[u] = above if above in members else nearest[above]
    return {u: nearest[u] for u in members}


def induced_candidate_graph(dag: Dag, cand: Iterable[NodeId]) -> Dag:
    """Transitive reduction of the reachability relation restricted to cand"""
    members = sorted(set(cand))
    if not members:
        raise EmptyCandidateSet("Cannot induce a graph from an empty candidate set")
    position = {old: new for new, old in enumerate(members)}
    member_set = set(members)
    children: List[List[int]] = [[] for _ in members]

    if is_down_forest(dag) or is_up_forest(dag):
        direction = Direction.DOWN if is_down_forest(dag) else Direction.UP
        for u, above in _nearest_member_parent(dag, member_set, direction).items():
            if above is None:
                continue
            if direction is Direction.DOWN:
                children[position[above]].append(position[u])
            else:
                children[position[u]].append(position[above])
    else:
        mask = bits_of(members)
        for old in members:
            below = dag.reach[old] & mask & ~(1 << old)
            covered = 0
            for w in iter_bits(below):
                covered |= dag.reach[w] & ~(1 << w)
            children[position[old]] = [position[w] for w in iter_bits(below & ~covered)]

    order = [position[u] for u in dag.topological_order if u in member_set]
    return Dag([dag.names[u] for u in members], children, topological_order=order)
