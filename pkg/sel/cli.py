"""sel CLI: Typer entrypoint."""

from __future__ import annotations

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Any, NoReturn

import typer
from pydantic import ValidationError

from sel import __version__
from sel.bounds.ucr import UcrVariant
from sel.config import apply_env, load_config
from sel.errors import DomainError, SelError, SolverError, ValidityError
from sel.models import BoundTable, DistanceKind, LabConfig, RunConfig
from sel.reporter import Reporter
from sel.runs import RunStore
from sel.services import EntropyKind, Lab, SmoothKind
from sel.statefile import load_distribution, load_problem, load_state, load_ucr

app = typer.Typer(
    name="sel",
    help="Smooth entropy lab: one-shot entropies, finite-blocklength bounds and simulators",
    no_args_is_help=True,
)

_cfg: LabConfig | None = None

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_VALIDITY = 4


class DistanceChoice(StrEnum):
    TRACE = "trace"
    FIDELITY = "fidelity"
    PURIFIED = "purified"


_DISTANCE_KINDS = {
    DistanceChoice.TRACE: DistanceKind.TRACE_DISTANCE,
    DistanceChoice.FIDELITY: DistanceKind.FIDELITY,
    DistanceChoice.PURIFIED: DistanceKind.PURIFIED_DISTANCE,
}


def _fail(code: int, message: str) -> NoReturn:
    typer.echo(f"error: {message}", err=True)
    raise typer.Exit(code)


@contextmanager
def _errors() -> Iterator[None]:
    try:
        yield
    except ValidityError as e:
        _fail(EXIT_VALIDITY, f"{e} (threshold {e.threshold:g})")
    except (SolverError, DomainError) as e:
        _fail(EXIT_NUMERICAL, str(e))
    except (SelError, ValidationError, FileNotFoundError) as e:
        _fail(EXIT_INPUT, str(e))


def _get_cfg() -> LabConfig:
    global _cfg
    if _cfg is None:
        _cfg = apply_env(load_config())
    return _cfg


def _lab(gap_tol: float | None = None, workers: int | None = None) -> Lab:
    overrides: dict[str, Any] = {}
    if gap_tol is not None:
        overrides["gap_tol"] = gap_tol
    if workers is not None:
        overrides["workers"] = workers
    cfg = _get_cfg()
    if overrides:
        cfg = LabConfig.model_validate({**cfg.model_dump(), **overrides})
    return Lab(cfg)


def _labels(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(float(s)) for s in _labels(text)]
    except ValueError as e:
        raise typer.BadParameter(f"not a list of integers: {text!r}") from e


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in _labels(text)]
    except ValueError as e:
        raise typer.BadParameter(f"not a list of numbers: {text!r}") from e


def _emit(lab: Lab, table: BoundTable, out: Path | None) -> str | None:
    path = lab.reporter.write_csv(table, out)
    if path is not None:
        typer.echo(f"Wrote {len(table.rows)} rows to {path}", err=True)
    return str(path) if path else None


def _record(lab: Lab, config: RunConfig, summary: dict[str, Any], output: str | None = None):
    rec = lab.record(config, summary, output)
    if rec is not None:
        logging.getLogger(__name__).debug(f"recorded run {rec.run_id}")


@app.callback()
def main_options(
    config: Path | None = typer.Option(None, "--config", "-c", help="YAML config file"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
):
    """Global options."""
    global _cfg
    with _errors():
        cfg = apply_env(load_config(str(config) if config else None))
    cfg.verbose = verbose or cfg.verbose
    _cfg = cfg
    logging.basicConfig(
        level=logging.DEBUG if cfg.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


@app.command()
def entropy(
    state: Path = typer.Option(..., "--state", help="State file (JSON)"),
    kind: EntropyKind = typer.Option(EntropyKind.MIN, "--kind"),
    a: str = typer.Option("A", "--a", help="Comma-separated systems of A"),
    b: str = typer.Option("", "--b", help="Comma-separated conditioning systems"),
    eps: float = typer.Option(0.0, "--eps", help="Smoothing parameter; 0 for non-smooth"),
    alpha: float | None = typer.Option(None, "--alpha", help="Rényi order for --kind renyi"),
    gap_tol: float | None = typer.Option(None, "--gap-tol"),
):
    """Conditional min-, max-, von Neumann or Rényi entropy of a state."""
    with _errors():
        lab = _lab(gap_tol)
        rho = load_state(state)
        result = lab.entropy(rho, kind, _labels(a), _labels(b), eps, alpha)
        typer.echo(str(result.value))
        if result.gap is not None:
            typer.echo(f"gap: {result.gap:.3e}")
        _record(
            lab,
            RunConfig(
                subcommand="entropy",
                inputs=[str(state)],
                eps={"eps": eps},
                params={"kind": str(kind), "a": a, "b": b, "alpha": alpha},
                gap_tol=gap_tol,
            ),
            {"bits": result.value.bits, "tol": result.value.tol, "gap": result.gap},
        )


@app.command()
def distance(
    state: Path = typer.Option(..., "--state"),
    state2: Path = typer.Option(..., "--state2"),
    kind: DistanceChoice = typer.Option(DistanceChoice.PURIFIED, "--kind"),
):
    """Trace distance, fidelity or purified distance between two states."""
    with _errors():
        lab = _lab()
        value = lab.distance(load_state(state), load_state(state2), _DISTANCE_KINDS[kind])
        typer.echo(f"{value.kind}: {value.value:.12g}")
        _record(
            lab,
            RunConfig(
                subcommand="distance", inputs=[str(state), str(state2)], params={"kind": str(kind)}
            ),
            {str(value.kind): value.value},
        )


@app.command()
def smooth(
    state: Path = typer.Option(..., "--state"),
    kind: SmoothKind = typer.Option(..., "--kind"),
    eps: float = typer.Option(..., "--eps"),
    a: str = typer.Option("A", "--a"),
    b: str = typer.Option("", "--b"),
    state2: Path | None = typer.Option(None, "--state2", help="sigma for --kind relmin"),
    gap_tol: float | None = typer.Option(None, "--gap-tol"),
):
    """Smooth min-, max- or relative min-entropy and the distance of the smoothed state."""
    with _errors():
        lab = _lab(gap_tol)
        sigma = load_state(state2) if state2 else None
        result = lab.smooth(load_state(state), kind, _labels(a), _labels(b), eps, sigma)
        typer.echo(str(result.value))
        if result.distance is not None:
            typer.echo(f"distance: {result.distance:.12g}")
        inputs = [str(state)] + ([str(state2)] if state2 else [])
        _record(
            lab,
            RunConfig(
                subcommand="smooth",
                inputs=inputs,
                eps={"eps": eps},
                params={"kind": str(kind), "a": a, "b": b},
                gap_tol=gap_tol,
            ),
            {"bits": result.value.bits, "tol": result.value.tol, "distance": result.distance},
        )


@app.command()
def aep(
    eps: float = typer.Option(..., "--eps"),
    eps2: float = typer.Option(..., "--eps2", help="Second parameter of the converse bounds"),
    n: str = typer.Option(..., "--n", help="Comma-separated block lengths"),
    state: Path | None = typer.Option(None, "--state", help="Single-copy state"),
    a: str = typer.Option("A", "--a"),
    b: str = typer.Option("", "--b"),
    h: float | None = typer.Option(None, "--h", help="Per-copy entropy, without --state"),
    v: float | None = typer.Option(None, "--v", help="Convergence parameter, without --state"),
    strict: bool = typer.Option(True, "--strict/--no-strict"),
    out: Path | None = typer.Option(None, "--out"),
):
    """Finite-n AEP bounds on the per-copy smooth entropies."""
    with _errors():
        lab = _lab()
        rho = load_state(state) if state else None
        table = lab.aep(eps, eps2, _ints(n), rho, _labels(a), _labels(b), h, v, strict)
        path = _emit(lab, table, out)
        _record(
            lab,
            RunConfig(
                subcommand="aep",
                inputs=[str(state)] if state else [],
                eps={"eps": eps, "eps2": eps2},
                params={"n": n, "h": h, "v": v, "strict": strict},
                output=path,
            ),
            {"rows": len(table.rows)},
            path,
        )


@app.command()
def ucr(
    state: Path = typer.Option(..., "--state", help="Uncertainty-relation setup file"),
    eps: float = typer.Option(..., "--eps"),
    variant: UcrVariant = typer.Option(UcrVariant.OVERLAP, "--variant"),
    eps2: float | None = typer.Option(None, "--eps2", help="eps_bar of the effective variant"),
    gap_tol: float | None = typer.Option(None, "--gap-tol"),
):
    """Residual lhs - rhs of an entropic uncertainty relation."""
    with _errors():
        lab = _lab(gap_tol)
        result = lab.ucr(load_ucr(state), eps, variant, eps2)
        typer.echo(f"lhs: {result.lhs}")
        typer.echo(f"rhs: {result.rhs}")
        typer.echo(f"residual: {result.slack:.9f}")
        _record(
            lab,
            RunConfig(
                subcommand="ucr",
                inputs=[str(state)],
                eps={"eps": eps, **({"eps2": eps2} if eps2 is not None else {})},
                params={"variant": str(variant)},
                gap_tol=gap_tol,
            ),
            {"lhs": float(result.lhs), "rhs": float(result.rhs), "residual": result.slack},
        )


@app.command()
def qkd(
    q: float = typer.Option(..., "--q", help="Observed bit error rate"),
    eps: float = typer.Option(..., "--eps", help="Correctness parameter eps_c"),
    eps2: float = typer.Option(..., "--eps2", help="Secrecy parameter eps_s"),
    n: str = typer.Option("", "--n", help="Comma-separated block lengths (default 1e4..1e8)"),
    out: Path | None = typer.Option(None, "--out"),
):
    """Finite-key rate curve of a BB84-type protocol."""
    with _errors():
        lab = _lab()
        table = lab.qkd(q, eps, eps2, _ints(n) if n else None)
        path = _emit(lab, table, out)
        _record(
            lab,
            RunConfig(
                subcommand="qkd",
                eps={"eps_c": eps, "eps_s": eps2},
                params={"q": q, "n": n},
                output=path,
            ),
            {"rows": len(table.rows), "last_rate": table.column("rate")[-1]},
            path,
        )


@app.command("compress-sim")
def compress_sim(
    state: Path = typer.Option(..., "--state", help="Joint distribution P_ZB (JSON)"),
    n: int = typer.Option(..., "--n", help="Block length"),
    m: int = typer.Option(..., "--m", help="Message length in bits"),
    trials: int = typer.Option(..., "--trials"),
    seed: int = typer.Option(..., "--seed"),
    workers: int | None = typer.Option(None, "--workers"),
):
    """Monte-Carlo error probability of random binning with MAP decoding."""
    with _errors():
        lab = _lab(workers=workers)
        result = lab.compress_sim(load_distribution(state), n, m, trials, seed)
        typer.echo(f"p_err: {result.p_err:.12g} ({result.errors}/{result.trials})")
        _record(
            lab,
            RunConfig(
                subcommand="compress-sim",
                inputs=[str(state)],
                params={"n": n, "m": m, "trials": trials},
                seed=seed,
            ),
            {"p_err": result.p_err, "errors": result.errors},
        )


@app.command("extract-sim")
def extract_sim(
    state: Path = typer.Option(..., "--state", help="Joint distribution P_ZE (JSON)"),
    ell: int = typer.Option(..., "--ell", help="Output length in bits"),
    samples: int | None = typer.Option(None, "--samples", help="Sample seeds instead of enumerating"),
    seed: int | None = typer.Option(None, "--seed"),
    exact: bool = typer.Option(False, "--exact", help="Minimize over sigma_E by linear programming"),
):
    """Average distance from uniform of Toeplitz-hashed output."""
    with _errors():
        if samples is not None and seed is None:
            _fail(EXIT_INPUT, "sampled seeds need an explicit --seed")
        lab = _lab()
        avg = lab.extract_sim(load_distribution(state), ell, samples, seed, exact)
        typer.echo(f"avg_delta: {avg:.12g}")
        _record(
            lab,
            RunConfig(
                subcommand="extract-sim",
                inputs=[str(state)],
                params={"ell": ell, "samples": samples, "exact": exact},
                seed=seed,
            ),
            {"avg_delta": avg},
        )


@app.command("sdp-solve")
def sdp_solve(
    state: Path = typer.Option(..., "--state", help="SDP problem file (JSON)"),
    gap_tol: float | None = typer.Option(None, "--gap-tol"),
):
    """Solve a standard-form SDP and print the certified primal/dual pair."""
    with _errors():
        lab = _lab(gap_tol)
        sol = lab.sdp_solve(load_problem(state))
        typer.echo(f"status: {sol.status}")
        typer.echo(f"alpha: {sol.primal_value:.12g}")
        typer.echo(f"beta: {sol.dual_value:.12g}")
        typer.echo(f"gap: {sol.gap:.3e}")
        typer.echo(f"iterations: {sol.iterations}")
        _record(
            lab,
            RunConfig(subcommand="sdp-solve", inputs=[str(state)], gap_tol=gap_tol),
            {"alpha": sol.primal_value, "beta": sol.dual_value, "gap": sol.gap},
        )


@app.command()
def figure61(
    p: float = typer.Option(0.2, "--p", help="Bernoulli parameter"),
    n: str = typer.Option("1,5,10,20", "--n", help="Comma-separated numbers of trials"),
    eps: float | None = typer.Option(None, "--eps", help="Add per-trial smooth entropies"),
    out: Path | None = typer.Option(None, "--out"),
):
    """Surprisal against cumulative probability for Bernoulli strings (CSV)."""
    with _errors():
        lab = _lab()
        table = lab.figure61(p, _ints(n), eps)
        path = _emit(lab, table, out)
        _record(
            lab,
            RunConfig(
                subcommand="figure61",
                eps={"eps": eps} if eps is not None else {},
                params={"p": p, "n": n},
                output=path,
            ),
            {"rows": len(table.rows)},
            path,
        )


@app.command()
def penalty(
    grid: str = typer.Option(
        "0.001,0.005,0.01,0.05,0.1,0.2,0.3,0.5,0.7,0.9", "--grid", help="Comma-separated eps values"
    ),
    out: Path | None = typer.Option(None, "--out"),
):
    """Smoothing penalty g(eps) against log 2/eps^2 (CSV)."""
    with _errors():
        lab = _lab()
        table = lab.penalty(_floats(grid))
        path = _emit(lab, table, out)
        _record(
            lab,
            RunConfig(subcommand="penalty", params={"grid": grid}, output=path),
            {"rows": len(table.rows)},
            path,
        )


runs_app = typer.Typer(help="Manage recorded runs")
app.add_typer(runs_app, name="runs")


def _run_store() -> RunStore:
    return RunStore(storage_dir=str(Path(_get_cfg().output_dir) / "runs"))


@runs_app.command("list")
def runs_list():
    """List recorded runs, newest first."""
    items = _run_store().list_runs()
    if not items:
        typer.echo(f"No runs in {_get_cfg().output_dir}/runs/")
        return
    for r in items:
        typer.echo(f"{r.run_id}  {r.config.subcommand}  {r.created_at.isoformat()[:19]}")


@runs_app.command("show")
def runs_show(run_id: str):
    """Show the configuration and summary of a run."""
    rec = _run_store().load(run_id)
    if not rec:
        typer.echo("Not found", err=True)
        raise typer.Exit(1)
    typer.echo(rec.model_dump_json(indent=2))


@runs_app.command("report")
def runs_report(run_id: str = typer.Argument("", help="Run ID, or empty for the latest report")):
    """Write a Markdown report for a run, or print the latest one."""
    reporter = Reporter(_get_cfg())
    if not run_id:
        try:
            typer.echo(reporter.load_latest())
        except FileNotFoundError:
            typer.echo("No reports found", err=True)
            raise typer.Exit(1) from None
        return
    rec = _run_store().load(run_id)
    if not rec:
        typer.echo("Not found", err=True)
        raise typer.Exit(1)
    typer.echo(reporter.generate(rec).read_text())


@runs_app.command("cleanup")
def runs_cleanup(days: int = typer.Option(7, help="Delete runs older than N days")):
    """Delete runs older than N days."""
    n = _run_store().cleanup_old_runs(days)
    typer.echo(f"Deleted {n} run(s)")


@app.command()
def version():
    """Show the sel version."""
    typer.echo(f"sel {__version__}")


def main():
    app()


if __name__ == "__main__":
    main()
