import numpy as np
import pytest
from pydantic import ValidationError

from humangs.core.exceptions import FormatError, TooLarge, WrongStructure
from humangs.models.experiment import Algorithm, ExperimentConfig, PhaseTrace
from humangs.models.plan import Variant
from humangs.services.graph_core import Direction, build_dag
from humangs.services.harness import (
    baseline_general_first,
    baseline_random,
    gen_balanced,
    gen_random_tree,
    graph_from_spec,
    restrict_depth,
    run_experiment,
    run_phases,
    run_sweep,
    simulate_answers,
    summarize_phases,
)
from humangs.services.semantics import Reply, make_targets


def test_balanced_generator_sizes():
    assert gen_balanced(2, 2).n == 7
    star = gen_balanced(3, 1)
    assert star.n == 4
    assert len(list(star.edges())) == 3
    assert gen_balanced(1, 5).n == 6
    assert gen_balanced(2, 13).n == 16383
    with pytest.raises(TooLarge):
        gen_balanced(2, 3, max_nodes=10)
    with pytest.raises(ValueError):
        gen_balanced(0, 2)


def test_balanced_up_generator_reverses_edges():
    up = gen_balanced(2, 2, Direction.UP)
    assert up.sinks() == [0]
    assert set(up.edges()) == {(v, u) for u, v in gen_balanced(2, 2).edges()}


def test_random_tree_is_reproducible():
    first, second = gen_random_tree(60, 3, seed=7), gen_random_tree(60, 3, seed=7)
    assert first == second
    assert first.roots() == [0]
    assert len(list(first.edges())) == 59
    assert max(len(kids) for kids in first.children) <= 3


def test_random_tree_with_one_child_is_a_chain():
    chain = gen_random_tree(5, 1, seed=3)
    assert list(chain.edges()) == [(0, 1), (1, 2), (2, 3), (3, 4)]


@pytest.mark.parametrize("spec", ["balanced:2", "balanced:x:2", "balanced:2:2:sideways", "random:5", "grid:3:3",
                                  "balanced:0:2"])
def test_bad_generator_specs(spec):
    with pytest.raises(FormatError):
        graph_from_spec(spec)


def test_generator_specs():
    assert graph_from_spec("balanced:2:3").n == 15
    assert graph_from_spec("balanced:2:3:up").sinks() == [0]
    assert graph_from_spec("random:20:2", seed=4) == gen_random_tree(20, 2, seed=4)


def test_simulated_answers(taxonomy):
    targets = make_targets(taxonomy, {taxonomy.index_of("sentra")}, Variant.SINGLE)
    answers = simulate_answers(taxonomy, targets, [1, 2, 5])
    assert answers.answers == {1: Reply.YES, 2: Reply.YES, 5: Reply.NO}


def test_random_baseline(taxonomy):
    picked = baseline_random(taxonomy, 3, seed=11)
    assert picked == sorted(set(picked))
    assert len(picked) == 3
    assert picked == baseline_random(taxonomy, 3, seed=11)
    assert baseline_random(taxonomy, 10, seed=0) == list(range(taxonomy.n))


def test_general_first_baseline(binary_down):
    assert baseline_general_first(binary_down, 3) == [1, 2, 3]
    forest = build_dag(list("abcd"), [("a", "b"), ("c", "d")])
    assert baseline_general_first(forest, 3) == [0, 2, 1]
    with pytest.raises(WrongStructure):
        baseline_general_first(gen_balanced(2, 2, Direction.UP), 1)


def test_restrict_depth():
    shallow = restrict_depth(gen_balanced(2, 3), 1)
    assert shallow.names == ("n0", "n1", "n2")
    assert set(shallow.edges()) == {(0, 1), (0, 2)}


def test_phases_isolate_the_target(chain):
    cfg = ExperimentConfig(k=1, phases=10)
    traces = run_phases(chain, 2, cfg)
    assert len(traces) <= 2
    assert traces[-1].candidate_size == 1


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(k=0)
    with pytest.raises(ValidationError):
        ExperimentConfig(k=1, graph="g.tsv", gen="balanced:2:2")


def test_experiment_is_deterministic():
    cfg = ExperimentConfig(gen="balanced:2:4", algorithm=Algorithm.RANDOM, k=2, phases=3, trials=6,
                           random_runs=3, seed=5)
    first, second = run_experiment(cfg), run_experiment(cfg)
    assert first.rows == second.rows
    assert len(first.rows) == 6 * 3
    assert len(first.aggregates) == 3


@pytest.mark.parametrize("algorithm", list(Algorithm))
def test_mean_sizes_never_grow(algorithm):
    cfg = ExperimentConfig(gen="balanced:2:4", algorithm=algorithm, k=2, phases=4, trials=10, random_runs=2)
    means = [row.mean_candidate_size for row in run_experiment(cfg).aggregates]
    assert all(a >= b for a, b in zip(means, means[1:]))
    assert means[0] <= 31


def test_planner_beats_the_baselines_on_a_large_tree():
    dag = gen_balanced(2, 13)
    means = {}
    for algorithm in Algorithm:
        cfg = ExperimentConfig(algorithm=algorithm, k=10, phases=1, trials=20, random_runs=3)
        means[algorithm] = run_experiment(cfg, dag=dag).aggregates[0].mean_candidate_size
    assert means[Algorithm.HUMANGS] < means[Algorithm.GENERAL_FIRST]
    assert means[Algorithm.HUMANGS] < means[Algorithm.RANDOM]


@pytest.fixture(scope="module")
def wide_taxonomy():
    return gen_random_tree(11_600, 20, seed=2024)


def test_ten_questions_beat_the_baselines_fivefold(wide_taxonomy):
    means = {}
    for algorithm in Algorithm:
        cfg = ExperimentConfig(algorithm=algorithm, k=10, phases=1, trials=30, random_runs=2)
        means[algorithm] = run_experiment(cfg, dag=wide_taxonomy).aggregates[0].mean_candidate_size
    best_baseline = min(means[Algorithm.RANDOM], means[Algorithm.GENERAL_FIRST])
    assert means[Algorithm.HUMANGS] <= 0.2 * best_baseline


def test_phases_of_a_hundred_questions_find_the_target(wide_taxonomy):
    results = {}
    for algorithm in (Algorithm.HUMANGS, Algorithm.GENERAL_FIRST):
        cfg = ExperimentConfig(algorithm=algorithm, k=100, phases=8, trials=30)
        results[algorithm] = run_experiment(cfg, dag=wide_taxonomy)
    humangs = results[Algorithm.HUMANGS]
    means = [row.mean_candidate_size for row in humangs.aggregates]
    assert means[1] <= 100
    assert means[-1] == 1
    assert humangs.summary.identified_fraction == 1
    assert results[Algorithm.GENERAL_FIRST].summary.mean_phases > humangs.summary.mean_phases


def test_summarize_phases():
    cfg = ExperimentConfig(k=1, phases=2)
    traces = [
        [PhaseTrace(trial=0, phase=1, questions=["a"], candidate_size=1)],
        [PhaseTrace(trial=1, phase=1, questions=["a"], candidate_size=3),
         PhaseTrace(trial=1, phase=2, questions=["b"], candidate_size=2)],
    ]
    summary = summarize_phases(traces, cfg)
    assert summary.mean_phases == pytest.approx(1.5)
    assert summary.mean_questions == pytest.approx(1.5)
    assert summary.identified_fraction == pytest.approx(0.5)


def test_sweeps():
    cfg = ExperimentConfig(gen="balanced:2:4", k=2, trials=5)
    rows = run_sweep(cfg, "k", [1, 2, 4])
    assert [row.value for row in rows] == [1, 2, 4]
    assert all(row.vary == "k" for row in rows)
    assert all(0 < row.mean_candidate_size <= 31 for row in rows)

    by_depth = run_sweep(cfg, "depth", [0, 2])
    assert by_depth[0].mean_candidate_size == 1
    assert np.isfinite(by_depth[1].mean_candidate_size)
    with pytest.raises(ValueError):
        run_sweep(cfg, "phases", [1])
