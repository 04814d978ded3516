"""
Command-line interface for humangs
"""
import json
import sys
import traceback
from pathlib import Path
from typing import Optional

import click

from humangs.config.settings import settings
from humangs.core.exceptions import (
    FormatError,
    GraphError,
    HumanGSError,
    InconsistentAnswers,
    InvalidTargetSet,
)
from humangs.core.logging import logger, set_level
from humangs.models.experiment import Algorithm, ExperimentConfig
from humangs.models.plan import Mode, Plan, Structure, Variant
from humangs.services.graph_core import Dag, induced_candidate_graph
from humangs.services.harness import graph_from_spec, run_experiment, run_sweep
from humangs.services.oracle import verify_plan
from humangs.services.semantics import AnswerSet, Reply, candidate_set
from humangs.services.solver_multi import solve_multi, solve_multi_unlimited
from humangs.services.solver_single_bounded import solve
from humangs.services.solver_single_unlimited import solve_unlimited
from humangs.utils.graph_io import (
    dump_graph,
    dump_plan,
    format_candidates,
    load_answers,
    load_graph,
    load_plan,
    write_experiment_csv,
    write_sweep_csv,
)

EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3
EXIT_INCONSISTENT = 4
EXIT_RETRIES = 5
EXIT_VERIFY_FAILED = 6

VARIANT = click.Choice([v.value for v in Variant])
MODE = click.Choice([m.value for m in Mode])
STRUCTURE = click.Choice([s.value for s in Structure])
ALGORITHM = click.Choice([a.value for a in Algorithm])


def _exit_code(error: HumanGSError) -> int:
    if isinstance(error, InconsistentAnswers):
        return EXIT_INCONSISTENT
    if isinstance(error, (GraphError, FormatError, InvalidTargetSet)):
        return EXIT_BAD_INPUT
    return EXIT_SOLVER


def _fail(ctx, error: Exception, code: int):
    if ctx.obj.get('verbose'):
        traceback.print_exc()
    logger.error(f"{type(error).__name__}: {error}")
    click.echo(f"❌ {error}", err=True)
    sys.exit(code)


def _graph(graph: Optional[str], gen: Optional[str], seed: int) -> Dag:
    if (graph is None) == (gen is None):
        raise click.UsageError("Give exactly one of --graph and --gen")
    return load_graph(graph) if graph is not None else graph_from_spec(gen, seed)


def make_plan(dag: Dag, variant: Variant, mode: Mode, k: Optional[int],
              structure: Structure = Structure.AUTO) -> Plan:
    """Route a variant/mode cell to its dispatcher"""
    if mode is Mode.UNLIMITED:
        return solve_unlimited(dag, structure) if variant is Variant.SINGLE else solve_multi_unlimited(dag)
    if variant is Variant.SINGLE:
        return solve(dag, k, structure)
    return solve_multi(dag, k, structure)


@click.group()
@click.option('--verbose', '-v',
              is_flag=True,
              help='Enable debug logging')
@click.pass_context
def cli(ctx, verbose: bool):
    """humangs - plan which questions to ask humans to locate targets in a DAG"""
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    if verbose:
        set_level("DEBUG")


@cli.command()
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Graph TSV file')
@click.option('--variant', type=VARIANT, default='single', show_default=True)
@click.option('--mode', type=MODE, default='bounded', show_default=True)
@click.option('--k', type=click.IntRange(min=0), default=None, help='Question budget (bounded mode)')
@click.option('--structure', type=STRUCTURE, default='auto', show_default=True,
              help='Force a solver family instead of classifying the graph')
@click.option('--out', '-o', type=click.Path(dir_okay=False), default=None, help='Write the plan here')
@click.pass_context
def plan(ctx, graph: str, variant: str, mode: str, k: Optional[int], structure: str, out: Optional[str]):
    """Compute a question plan"""
    if mode == Mode.BOUNDED.value and k is None:
        raise click.UsageError("--mode bounded requires --k")
    try:
        dag = load_graph(graph)
        result = make_plan(dag, Variant(variant), Mode(mode), k, Structure(structure))
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))

    document = dump_plan(dag, result)
    if out:
        Path(out).write_text(document + "\n", encoding="utf-8")
        click.echo(f"✅ Plan ({result.method}, wcase {result.wcase}) written to {out}")
    else:
        click.echo(document)


@cli.command(name='eval')
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--answers', '-a', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Answers file: name<TAB>YES|NO per line')
@click.option('--variant', type=VARIANT, default='single', show_default=True)
@click.pass_context
def eval_answers(ctx, graph: str, answers: str, variant: str):
    """Print the candidate set for a set of answers"""
    try:
        dag = load_graph(graph)
        cand = candidate_set(dag, load_answers(dag, answers), Variant(variant))
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))
    click.echo(format_candidates(dag, cand))


def _read_reply(ctx, name: str) -> Optional[Reply]:
    """Prompt until a YES/NO line arrives; None when the user quits"""
    for attempt in range(1, settings.INTERACT_MAX_RETRIES + 1):
        try:
            line = click.prompt(f"❓ Is a target reachable from {name}? [YES/NO/quit]", default='',
                                show_default=False)
        except click.Abort:
            return None
        value = line.strip().upper()
        if value in ('Q', 'QUIT'):
            return None
        if value in ('YES', 'NO'):
            return Reply(value)
        click.echo(f"⚠️ Please answer YES or NO ({attempt}/{settings.INTERACT_MAX_RETRIES})", err=True)
    _fail(ctx, ValueError(f"No valid answer after {settings.INTERACT_MAX_RETRIES} attempts"), EXIT_RETRIES)


@cli.command()
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--variant', type=VARIANT, default='single', show_default=True)
@click.option('--k', type=click.IntRange(min=1), required=True, help='Questions per phase')
@click.pass_context
def interact(ctx, graph: str, variant: str, k: int):
    """Ask questions phase by phase until the candidate set is a single node"""
    try:
        current = load_graph(graph)
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))
    chosen = Variant(variant)

    phase = 0
    while current.n > 1:
        phase += 1
        try:
            questions = make_plan(current, chosen, Mode.BOUNDED, k).questions
        except HumanGSError as e:
            _fail(ctx, e, _exit_code(e))
        if not questions:
            break
        click.echo(f"\n📋 Phase {phase}: {len(questions)} questions over {current.n} candidates")

        answers, quit_requested = AnswerSet(), False
        for u in questions:
            reply = _read_reply(ctx, current.names[u])
            if reply is None:
                quit_requested = True
                break
            answers.answers[u] = reply
        try:
            cand = candidate_set(current, answers, chosen)
        except HumanGSError as e:
            _fail(ctx, e, _exit_code(e))
        click.echo(f"🔎 {len(cand)} candidates remain")
        stalled = len(cand) == current.n
        current = induced_candidate_graph(current, cand)
        if quit_requested or stalled:
            break

    click.echo("🎯 Final candidates:")
    click.echo(format_candidates(current, range(current.n)))


@cli.command()
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), default=None)
@click.option('--gen', default=None, help='balanced:<m>:<d>[:up] or random:<n>:<max_children>')
@click.option('--algorithm', type=ALGORITHM, default='humangs', show_default=True)
@click.option('--k', type=click.IntRange(min=1), required=True, help='Questions per phase')
@click.option('--phases', type=click.IntRange(min=1), default=settings.DEFAULT_PHASES, show_default=True)
@click.option('--trials', type=click.IntRange(min=1), default=settings.DEFAULT_TRIALS, show_default=True)
@click.option('--random-runs', type=click.IntRange(min=1), default=settings.DEFAULT_RANDOM_RUNS,
              show_default=True, help='Runs averaged per trial for the random baseline')
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=settings.DEFAULT_SEED,
              show_default=True)
@click.option('--depth', type=click.IntRange(min=0), default=None, help='Drop nodes deeper than this')
@click.option('--out', '-o', type=click.Path(dir_okay=False), required=True, help='Per-trial CSV file')
@click.pass_context
def simulate(ctx, graph, gen, algorithm, k, phases, trials, random_runs, seed, depth, out):
    """Run the phase-based experiment with simulated truthful answers"""
    try:
        dag = _graph(graph, gen, seed)
        cfg = ExperimentConfig(graph=graph, gen=gen, depth=depth, algorithm=Algorithm(algorithm), k=k,
                               phases=phases, trials=trials, random_runs=random_runs, seed=seed)
        result = run_experiment(cfg, dag=dag)
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))

    rows_path, agg_path = write_experiment_csv(result, out)
    summary = result.summary
    click.echo(f"✅ Wrote {rows_path} and {agg_path}")
    click.echo(f"📊 {summary.algorithm.value}: final mean size {result.aggregates[-1].mean_candidate_size:.2f}, "
               f"mean phases {summary.mean_phases:.2f}, identified {summary.identified_fraction:.0%}")


@cli.command()
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), default=None)
@click.option('--gen', default=None, help='balanced:<m>:<d>[:up] or random:<n>:<max_children>')
@click.option('--algorithm', type=ALGORITHM, default='humangs', show_default=True)
@click.option('--vary', type=click.Choice(['k', 'depth']), required=True)
@click.option('--values', required=True, help='Comma-separated values, e.g. 10,20,50')
@click.option('--k', type=click.IntRange(min=1), default=10, show_default=True,
              help='Budget when varying depth')
@click.option('--trials', type=click.IntRange(min=1), default=settings.DEFAULT_TRIALS, show_default=True)
@click.option('--random-runs', type=click.IntRange(min=1), default=settings.DEFAULT_RANDOM_RUNS,
              show_default=True)
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=settings.DEFAULT_SEED,
              show_default=True)
@click.option('--out', '-o', type=click.Path(dir_okay=False), required=True)
@click.pass_context
def sweep(ctx, graph, gen, algorithm, vary, values, k, trials, random_runs, seed, out):
    """Single-phase mean candidate size while varying k or tree depth"""
    try:
        points = [int(v) for v in values.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f"Expected comma-separated integers, got {values!r}", param_hint='--values')
    if not points or min(points) < (1 if vary == 'k' else 0):
        raise click.BadParameter("Values out of range", param_hint='--values')
    try:
        dag = _graph(graph, gen, seed)
        cfg = ExperimentConfig(graph=graph, gen=gen, algorithm=Algorithm(algorithm), k=k, phases=1,
                               trials=trials, random_runs=random_runs, seed=seed)
        rows = run_sweep(cfg, vary, points, dag=dag)
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))
    write_sweep_csv(rows, out)
    click.echo(f"✅ Wrote {len(rows)} sweep rows to {out}")


@cli.command()
@click.option('--gen', required=True, help='balanced:<m>:<d>[:up] or random:<n>:<max_children>')
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=settings.DEFAULT_SEED,
              show_default=True)
@click.option('--out', '-o', type=click.Path(dir_okay=False), default=None)
@click.pass_context
def gen(ctx, gen: str, seed: int, out: Optional[str]):
    """Generate a graph file"""
    try:
        dag = graph_from_spec(gen, seed)
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))
    if out:
        Path(out).write_text(dump_graph(dag), encoding="utf-8")
        click.echo(f"✅ Wrote {dag.n} nodes to {out}")
    else:
        click.echo(dump_graph(dag), nl=False)


@cli.command()
@click.option('--graph', '-g', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--plan', 'plan_file', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--variant', type=VARIANT, default=None, help="Defaults to the plan's own variant")
@click.pass_context
def verify(ctx, graph: str, plan_file: str, variant: Optional[str]):
    """Recompute a plan's worst case exhaustively"""
    try:
        dag = load_graph(graph)
        loaded = load_plan(dag, plan_file)
    except HumanGSError as e:
        _fail(ctx, e, EXIT_BAD_INPUT)
    try:
        report = verify_plan(dag, loaded, Variant(variant) if variant else None)
    except HumanGSError as e:
        _fail(ctx, e, _exit_code(e))

    click.echo(json.dumps(report.model_dump(by_alias=True), indent=2))
    if not report.passed:
        sys.exit(EXIT_VERIFY_FAILED)


@cli.command()
def version():
    """Show version information"""
    from . import __version__
    click.echo(f"humangs v{__version__}")


def main():
    """Main entry point"""
    try:
        cli()
    except KeyboardInterrupt:
        click.echo("\n🛑 Interrupted by user")
        sys.exit(0)


if __name__ == '__main__':
    main()
