"""
Command-line tests through click's runner
"""
import json

import pytest
from click.testing import CliRunner

from humangs import __version__
from humangs.cli import cli
from humangs.utils.graph_io import dump_graph


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_graph(tmp_path):
    def write(dag, name="graph.tsv"):
        path = tmp_path / name
        path.write_text(dump_graph(dag), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def write_text(tmp_path):
    def write(text, name):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def _last_line(result):
    return result.stdout.strip().splitlines()[-1]


def test_version(runner):
    result = runner.invoke(cli, ["version"])
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_plan_on_taxonomy(runner, write_graph, taxonomy):
    result = runner.invoke(cli, ["plan", "--graph", write_graph(taxonomy), "--k", "2"])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["method"] == "down-forest"
    assert document["wcase"] == 3


def test_plan_to_file(runner, write_graph, taxonomy, tmp_path):
    out = tmp_path / "plan.json"
    result = runner.invoke(cli, ["plan", "-g", write_graph(taxonomy), "--k", "2", "-o", str(out)])
    assert result.exit_code == 0
    assert json.loads(out.read_text())["k"] == 2


def test_bounded_plan_needs_a_budget(runner, write_graph, taxonomy):
    result = runner.invoke(cli, ["plan", "--graph", write_graph(taxonomy)])
    assert result.exit_code == 2


def test_multi_unlimited_asks_everything(runner, write_graph, taxonomy):
    result = runner.invoke(cli, ["plan", "--graph", write_graph(taxonomy), "--variant", "multi",
                                 "--mode", "unlimited"])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["questions"] == sorted(taxonomy.names)
    assert "k" not in document


def test_large_general_dag_has_no_solver(runner, write_text):
    names = [f"v{i}" for i in range(20)]
    lines = [f"n\t{name}" for name in names]
    lines += [f"e\tv0\t{name}" for name in names[1:]] + ["e\tv1\tv19"]
    result = runner.invoke(cli, ["plan", "--graph", write_text("\n".join(lines) + "\n", "wide.tsv"), "--k", "3"])
    assert result.exit_code == 3


def test_cyclic_graph_is_bad_input(runner, write_text):
    path = write_text("n\ta\nn\tb\ne\ta\tb\ne\tb\ta\n", "cycle.tsv")
    result = runner.invoke(cli, ["plan", "--graph", path, "--k", "1"])
    assert result.exit_code == 2
    assert "cycle" in result.stderr


def test_eval(runner, write_graph, write_text, taxonomy):
    answers = write_text("car\tYES\nnissan\tYES\nmercedes\tNO\n", "answers.tsv")
    result = runner.invoke(cli, ["eval", "--graph", write_graph(taxonomy), "--answers", answers])
    assert result.exit_code == 0
    assert result.stdout.splitlines() == ["maxima", "nissan", "sentra"]


def test_eval_without_answers(runner, write_graph, write_text, taxonomy):
    result = runner.invoke(cli, ["eval", "-g", write_graph(taxonomy), "-a", write_text("", "empty.tsv")])
    assert result.exit_code == 0
    assert result.stdout.splitlines() == sorted(taxonomy.names)


def test_eval_inconsistent(runner, write_graph, write_text, chain):
    answers = write_text("a\tNO\nb\tYES\n", "answers.tsv")
    result = runner.invoke(cli, ["eval", "-g", write_graph(chain), "-a", answers])
    assert result.exit_code == 4


def test_interact_chain(runner, write_graph, chain):
    result = runner.invoke(cli, ["interact", "--graph", write_graph(chain), "--k", "1"], input="NO\n")
    assert result.exit_code == 0
    assert _last_line(result) == "a"


def test_interact_star(runner, write_graph, star):
    result = runner.invoke(cli, ["interact", "--graph", write_graph(star), "--k", "1"], input="yes\n")
    assert result.exit_code == 0
    assert _last_line(result) == "b"


def test_interact_gives_up_on_garbage(runner, write_graph, chain):
    result = runner.invoke(cli, ["interact", "--graph", write_graph(chain), "--k", "1"], input="x\ny\nz\n")
    assert result.exit_code == 5


def test_interact_quit(runner, write_graph, chain):
    result = runner.invoke(cli, ["interact", "--graph", write_graph(chain), "--k", "1"], input="quit\n")
    assert result.exit_code == 0
    assert "🎯 Final candidates:" in result.stdout
    assert result.stdout.strip().splitlines()[-3:] == ["a", "b", "c"]


def test_simulate_is_deterministic(runner, tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        result = runner.invoke(cli, ["simulate", "--gen", "balanced:2:4", "--algorithm", "random", "--k", "2",
                                     "--trials", "5", "--phases", "3", "--random-runs", "2", "--seed", "9",
                                     "--out", str(out)])
        assert result.exit_code == 0
        outputs.append(out.read_text())
    assert outputs[0] == outputs[1]
    assert outputs[0].splitlines()[0] == "algorithm,phase,k,trial,candidate_size"
    assert (tmp_path / "first_aggregate.csv").exists()


def test_simulate_needs_one_source(runner, write_graph, chain, tmp_path):
    result = runner.invoke(cli, ["simulate", "--graph", write_graph(chain), "--gen", "balanced:2:2",
                                 "--k", "1", "--out", str(tmp_path / "r.csv")])
    assert result.exit_code == 2


def test_sweep(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    result = runner.invoke(cli, ["sweep", "--gen", "balanced:2:4", "--vary", "k", "--values", "1,2",
                                 "--trials", "3", "--out", str(out)])
    assert result.exit_code == 0
    assert len(out.read_text().splitlines()) == 3

    result = runner.invoke(cli, ["sweep", "--gen", "balanced:2:4", "--vary", "k", "--values", "a,b",
                                 "--out", str(out)])
    assert result.exit_code == 2


def test_gen(runner, tmp_path):
    result = runner.invoke(cli, ["gen", "--gen", "balanced:2:2"])
    assert result.exit_code == 0
    assert sum(line.startswith("n\t") for line in result.stdout.splitlines()) == 7

    out = tmp_path / "tree.tsv"
    assert runner.invoke(cli, ["gen", "--gen", "random:30:3", "--seed", "2", "-o", str(out)]).exit_code == 0
    assert len(out.read_text().splitlines()) == 30 + 29

    assert runner.invoke(cli, ["gen", "--gen", "grid:3:3"]).exit_code == 2


def test_verify(runner, write_graph, write_text, taxonomy, tmp_path):
    graph = write_graph(taxonomy)
    plan_path = tmp_path / "plan.json"
    assert runner.invoke(cli, ["plan", "-g", graph, "--k", "2", "-o", str(plan_path)]).exit_code == 0

    result = runner.invoke(cli, ["verify", "--graph", graph, "--plan", str(plan_path)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["pass"] is True

    document = json.loads(plan_path.read_text())
    document["wcase"] = 2
    tampered = write_text(json.dumps(document), "tampered.json")
    result = runner.invoke(cli, ["verify", "--graph", graph, "--plan", tampered])
    assert result.exit_code == 6
    assert json.loads(result.stdout)["found_wcase"] == 3

    result = runner.invoke(cli, ["verify", "--graph", graph, "--plan", write_text("{not json", "bad.json")])
    assert result.exit_code == 2
