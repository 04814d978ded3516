import time

import pytest
from hypothesis import given, settings, strategies as st

from humangs.core.exceptions import BudgetTooLarge, NoSolverApplicable, TooLarge, WrongStructure
from humangs.models.plan import Mode, Structure, Variant
from humangs.services.graph_core import Direction, augment_forest, build_dag, reverse
from humangs.services.harness import gen_balanced, gen_random_tree
from humangs.services.oracle import oracle_optimal, oracle_wcase
from humangs.services.solver_single_bounded import (
    balanced_up_applies,
    brute_force,
    down_forest_wcase,
    partitioning,
    solve,
    solve_balanced_down,
    solve_balanced_up,
    solve_down_forest,
    solve_up_forest,
    _up_tables,
    up_forest_wcase,
)

from strategies import dags, down_forests, up_forests


def test_brute_force_on_chain(chain):
    plan = brute_force(chain, 1)
    assert plan.questions == [1]
    assert plan.wcase == 2
    assert plan.method == "brute-force"


def test_brute_force_limits(chain):
    big = build_dag([f"v{i}" for i in range(15)], [])
    with pytest.raises(TooLarge):
        brute_force(big, 2)
    with pytest.raises(TooLarge):
        brute_force(chain, 1, max_work=1)


def test_budget_larger_than_graph_asks_enough(chain):
    assert brute_force(chain, 10).wcase == 1
    assert solve_down_forest(chain, 10).wcase == 1


def test_zero_budget(taxonomy):
    plan = solve(taxonomy, 0)
    assert plan.questions == []
    assert plan.wcase == taxonomy.n


def test_single_node():
    plan = solve(build_dag(["x"], []), 3)
    assert plan.questions == []
    assert plan.wcase == 1


def test_down_forest_on_binary_tree(binary_down):
    plan = solve_down_forest(binary_down, 2)
    assert plan.questions == [1, 2]
    assert plan.wcase == 3
    assert plan.slack == 0


def test_down_forest_on_taxonomy(taxonomy):
    plan = solve(taxonomy, 2)
    assert plan.method == "down-forest"
    assert plan.wcase == 3
    assert plan.wcase == oracle_optimal(taxonomy, 2, Variant.SINGLE).wcase


def test_tree_solvers_skip_questions_that_cannot_help(taxonomy):
    tree_plan = solve(taxonomy, 2)
    general_plan = solve(taxonomy, 2, Structure.DAG)
    assert taxonomy.names_of(tree_plan.questions) == ["nissan"]
    assert taxonomy.names_of(general_plan.questions) == ["nissan", "vehicle"]
    assert tree_plan.wcase == general_plan.wcase == 3
    assert solve(taxonomy, 2, Structure.DOWN_FOREST) == tree_plan


def test_partitioning(taxonomy):
    car, nissan = taxonomy.index_of("car"), taxonomy.index_of("nissan")
    parts = partitioning(taxonomy, [car, nissan])
    assert parts.owners == (None, car, nissan)
    assert [taxonomy.names_of(block) for block in parts.blocks] == [
        ["vehicle"], ["car", "mercedes"], ["maxima", "nissan", "sentra"],
    ]
    assert down_forest_wcase(taxonomy, [car, nissan]) == 3


def test_up_forest_on_binary_tree(binary_up):
    plan = solve_up_forest(binary_up, 2)
    assert plan.wcase == 2
    assert up_forest_wcase(binary_up, plan.questions) == 2


def test_solvers_reject_wrong_orientation(binary_up, binary_down, diamond):
    with pytest.raises(WrongStructure):
        solve_down_forest(binary_up, 1)
    with pytest.raises(WrongStructure):
        solve_up_forest(binary_down, 1)
    with pytest.raises(WrongStructure):
        partitioning(diamond, [0])


def test_balanced_down_examples():
    tree = gen_balanced(2, 2)
    plan = solve_balanced_down(tree, 2)
    assert plan.questions == [1, 2]
    assert plan.wcase == 3

    deeper = gen_balanced(2, 4)
    plan = solve_balanced_down(deeper, 3)
    assert plan.wcase == 9
    assert plan.wcase == solve_down_forest(deeper, 3).wcase
    assert down_forest_wcase(deeper, plan.questions) == 9


def test_balanced_down_guards(taxonomy):
    with pytest.raises(BudgetTooLarge):
        solve_balanced_down(gen_balanced(2, 2), 3)
    with pytest.raises(WrongStructure):
        solve_balanced_down(taxonomy, 1)


def test_balanced_up_examples():
    tree = gen_balanced(2, 2, Direction.UP)
    two = solve_balanced_up(tree, 2)
    assert two.questions == [3, 5]
    assert two.wcase == 2
    one = solve_balanced_up(tree, 1)
    assert one.questions == [3]
    assert one.wcase == 4
    assert solve_balanced_up(tree, 0).questions == []


@pytest.mark.parametrize("m, d", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_balanced_shortcuts_match_general_solvers(m, d):
    down, up = gen_balanced(m, d), gen_balanced(m, d, Direction.UP)
    k = 1
    while k * k <= m ** d:
        assert solve_balanced_down(down, k).wcase == solve_down_forest(down, k).wcase
        k += 1
    for k in range(1, 5):
        if not balanced_up_applies(up.n, k, d):
            break
        assert solve_balanced_up(up, k).wcase == solve_up_forest(up, k).wcase


def test_dispatch_methods(binary_down, binary_up, taxonomy, diamond):
    assert solve(binary_down, 2).method == "balanced-down"
    assert solve(binary_down, 3).method == "down-forest"
    assert solve(binary_up, 2).method == "up-forest"
    assert solve(gen_balanced(2, 4, Direction.UP), 2).method == "balanced-up"
    assert solve(diamond, 1).method == "brute-force"
    assert solve(taxonomy, 1, Structure.DAG).method == "brute-force"
    assert solve(binary_up, 1, Structure.UP_FOREST).method == "up-forest"


def test_dispatch_gives_up_on_large_dags():
    names = [f"v{i}" for i in range(20)]
    edges = [(names[0], names[i]) for i in range(1, 20)] + [(names[1], names[19])]
    with pytest.raises(NoSolverApplicable):
        solve(build_dag(names, edges), 3)


@given(down_forests(max_nodes=9), st.integers(0, 3))
def test_down_forest_is_optimal(forest, k):
    plan = solve_down_forest(forest, k)
    assert len(plan.questions) <= k
    assert plan.wcase == oracle_wcase(forest, plan.questions, Variant.SINGLE)
    assert plan.wcase == oracle_optimal(forest, k, Variant.SINGLE, Mode.BOUNDED).wcase


@given(up_forests(max_nodes=9), st.integers(0, 3))
def test_up_forest_is_optimal(forest, k):
    plan = solve_up_forest(forest, k)
    assert len(plan.questions) <= k
    assert plan.wcase == oracle_wcase(forest, plan.questions, Variant.SINGLE)
    assert plan.wcase == oracle_optimal(forest, k, Variant.SINGLE, Mode.BOUNDED).wcase


@settings(max_examples=30)
@given(up_forests(max_nodes=8), st.integers(1, 3))
def test_up_forest_pruning_keeps_the_optimum(forest, k):
    assert solve_up_forest(forest, k, prune=True).wcase == solve_up_forest(forest, k, prune=False).wcase


@given(dags(max_nodes=8), st.integers(0, 3))
def test_dispatcher_is_optimal_on_small_dags(dag, k):
    plan = solve(dag, k)
    assert plan.wcase == oracle_wcase(dag, plan.questions, Variant.SINGLE)
    assert plan.wcase == oracle_optimal(dag, k, Variant.SINGLE).wcase


@given(up_forests(max_nodes=9), st.integers(0, 4))
def test_up_forest_states_record_the_budget_per_tree(forest, k):
    augmented = augment_forest(forest, Direction.UP)
    table = _up_tables(augmented.tree, augmented.virtual_root, min(k, forest.n), forest.n, True)
    for spent, states in table.items():
        for state in states:
            assert len(state.split) == len(forest.sinks())
            assert sum(state.split) == spent == len(state.questions)


def test_down_forest_scales_to_a_hundred_thousand_nodes():
    tree = gen_random_tree(100_000, 5, seed=11)
    start = time.perf_counter()
    plan = solve_down_forest(tree, 10)
    assert time.perf_counter() - start < 5
    assert len(plan.questions) <= 10
    assert plan.wcase == down_forest_wcase(tree, plan.questions)


def test_up_forest_on_two_hundred_nodes():
    tree = reverse(gen_random_tree(200, 3, seed=11))
    start = time.perf_counter()
    plan = solve_up_forest(tree, 5)
    assert time.perf_counter() - start < 60
    assert plan.wcase == up_forest_wcase(tree, plan.questions)
