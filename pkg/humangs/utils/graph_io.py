"""
File formats: graph TSV, answer files, plan JSON, candidate lists and
experiment CSVs.
"""
import csv
import json
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from pydantic import ValidationError

from humangs.core.exceptions import FormatError
from humangs.core.logging import logger
from humangs.models.experiment import ExperimentResult, SweepRow
from humangs.models.plan import Plan, PlanDocument
from humangs.services.graph_core import Dag, build_dag
from humangs.services.semantics import AnswerSet, Reply

PathLike = Union[str, Path]


def parse_graph(text: str) -> Dag:
    """Parse `n<TAB>name` and `e<TAB>src<TAB>dst` lines; `#` starts a comment line"""
    nodes: List[str] = []
    edges: List[Tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "n" and len(fields) == 2 and fields[1]:
            nodes.append(fields[1])
        elif fields[0] == "e" and len(fields) == 3 and fields[1] and fields[2]:
            edges.append((fields[1], fields[2]))
        else:
            raise FormatError(f"Line {lineno}: expected 'n<TAB>name' or 'e<TAB>src<TAB>dst', got {line!r}")
    return build_dag(nodes, edges)


def load_graph(path: PathLike) -> Dag:
    dag = parse_graph(Path(path).read_text(encoding="utf-8"))
    logger.info(f"Loaded {dag!r} from {path}")
    return dag


def dump_graph(dag: Dag) -> str:
    lines = [f"n\t{name}" for name in dag.names]
    lines += [f"e\t{dag.names[u]}\t{dag.names[v]}" for u, v in dag.edges()]
    return "\n".join(lines) + "\n"


def parse_answers(dag: Dag, text: str) -> AnswerSet:
    """Parse `name<TAB>YES|NO` lines against the graph's node names"""
    answers = AnswerSet()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or fields[1].strip().upper() not in ("YES", "NO"):
            raise FormatError(f"Line {lineno}: expected 'name<TAB>YES|NO', got {line!r}")
        u = dag.index_of(fields[0])
        reply = Reply(fields[1].strip().upper())
        if answers.answers.get(u, reply) is not reply:
            raise FormatError(f"Line {lineno}: conflicting answers for {fields[0]}")
        answers.answers[u] = reply
    return answers


def load_answers(dag: Dag, path: PathLike) -> AnswerSet:
    return parse_answers(dag, Path(path).read_text(encoding="utf-8"))


def format_candidates(dag: Dag, cand: Iterable[int]) -> str:
    return "\n".join(dag.names_of(cand))


def plan_to_document(dag: Dag, plan: Plan) -> PlanDocument:
    return PlanDocument(variant=plan.variant, mode=plan.mode, k=plan.k, method=plan.method,
                        slack=plan.slack, wcase=plan.wcase, questions=dag.names_of(plan.questions))


def dump_plan(dag: Dag, plan: Plan) -> str:
    return plan_to_document(dag, plan).model_dump_json(indent=2, exclude_none=True)


def parse_plan(dag: Dag, text: str) -> Plan:
    try:
        document = PlanDocument.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise FormatError(f"Malformed plan: {e}") from e
    return Plan(variant=document.variant, mode=document.mode, k=document.k, method=document.method,
                slack=document.slack, wcase=document.wcase,
                questions=sorted(dag.index_of(name) for name in document.questions))


def load_plan(dag: Dag, path: PathLike) -> Plan:
    return parse_plan(dag, Path(path).read_text(encoding="utf-8"))


def _number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else f"{value:.4f}"


def aggregate_path(path: PathLike) -> Path:
    """results.csv -> results_aggregate.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}_aggregate{path.suffix or '.csv'}")


def write_experiment_csv(result: ExperimentResult, path: PathLike) -> Tuple[Path, Path]:
    """Per-trial rows to path, per-phase means alongside"""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["algorithm", "phase", "k", "trial", "candidate_size"])
        for row in result.rows:
            writer.writerow([row.algorithm.value, row.phase, row.k, row.trial, _number(row.candidate_size)])

    agg = aggregate_path(path)
    with agg.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["algorithm", "phase", "k", "mean_candidate_size"])
        for row in result.aggregates:
            writer.writerow([row.algorithm.value, row.phase, row.k, _number(row.mean_candidate_size)])
    logger.info(f"Wrote {len(result.rows)} rows to {path} and {len(result.aggregates)} to {agg}")
    return path, agg


def write_sweep_csv(rows: Sequence[SweepRow], path: PathLike) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["algorithm", "vary", "value", "mean_candidate_size"])
        for row in rows:
            writer.writerow([row.algorithm.value, row.vary, row.value, _number(row.mean_candidate_size)])
    return path
