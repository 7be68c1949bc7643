"""``crn`` command line.  Exit codes: 0 ok, 1 degenerate or inconclusive items, 2 input error."""

from __future__ import annotations

import csv
import sys
from fractions import Fraction
from pathlib import Path

import click

from .network import NetworkError, UnboundRateError, parse_network, parse_rate

EXIT_DEGENERATE = 1
EXIT_INPUT = 2


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _common(f):
    f = click.option("--json", "json_path", type=click.Path(dir_okay=False, allow_dash=True),
                     help="Also write the report as JSON ('-' for stdout).")(f)
    f = click.option("--param", "params", multiple=True, metavar="NAME=VALUE",
                     help="Bind a rate symbol (repeatable); values are exact.")(f)
    f = click.option("--seed", type=int, default=None, help="Random seed.")(f)
    f = click.option("--width", type=str, default=None, help="Relative root isolation width [1e-12].")(f)
    f = click.option("--tol", type=float, default=None, help="Residual tolerance [1e-9].")(f)
    return f


def _opts(ctx, json_path, params, seed, width, tol) -> dict:
    base = ctx.find_root().obj or {}
    try:
        from .analysis import parse_params

        bound = dict(base.get("params", {}))
        bound.update(parse_params(params))
        w = width or base.get("width") or "1e-12"
        return {"json": json_path or base.get("json"), "params": bound,
                "seed": seed if seed is not None else base.get("seed"),
                "width": Fraction(w), "tol": tol if tol is not None else base.get("tol") or 1e-9}
    except ValueError as e:
        raise InputError(str(e)) from None


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return parse_network(text)
    except NetworkError as e:
        raise InputError(f"{path}: {e}") from None


def _emit_json(target, model) -> None:
    if not target:
        return
    text = model.model_dump_json(indent=2) + "\n"
    if target == "-":
        click.echo(text, nl=False)
    else:
        Path(target).write_text(text)


def _guard(fn):
    """Map library errors on user input to exit code 2."""
    import functools

    @functools.wraps(fn)
    def wrapper(*a, **kw):
        try:
            return fn(*a, **kw)
        except UnboundRateError as e:
            raise InputError(f"{e} (bind with --param NAME=VALUE)") from None
        except (NetworkError, KeyError, ValueError) as e:
            raise InputError(str(e)) from None

    return wrapper


@click.group()
@_common
@click.pass_context
def main(ctx, json_path, params, seed, width, tol):
    """Count and classify positive steady states of reaction networks."""
    from .analysis import parse_params

    try:
        ctx.obj = {"json": json_path, "params": parse_params(params), "seed": seed,
                   "width": width, "tol": tol}
    except ValueError as e:
        raise InputError(str(e)) from None


@main.command()
@click.argument("file")
@_common
@click.option("--timing", is_flag=True, help="Record wall time in the report.")
@click.pass_context
@_guard
def analyze(ctx, file, json_path, params, seed, width, tol, timing):
    """Full report: normalization, counts, roots, states and stability."""
    from .analysis import run_analyze
    from .reports import render_analysis

    o = _opts(ctx, json_path, params, seed, width, tol)
    report = run_analyze(_load(file), o["params"], o["width"], o["tol"], o["seed"], timing)
    if o["json"] != "-":
        click.echo(render_analysis(report), nl=False)
    _emit_json(o["json"], report)
    if report.has_degenerate:
        ctx.exit(EXIT_DEGENERATE)


@main.command()
@click.argument("file")
@_common
@click.pass_context
@_guard
def count(ctx, file, json_path, params, seed, width, tol):
    """Number of positive steady states."""
    from .analysis import run_count

    o = _opts(ctx, json_path, params, seed, width, tol)
    n, method = run_count(_load(file), o["params"])
    click.echo(f"{'unknown' if n is None else n} ({method})")
    if n is None:
        ctx.exit(EXIT_DEGENERATE)


@main.command()
@click.argument("file")
@_common
@click.option("--region", is_flag=True, help="Print the rate inequalities for the maximal count.")
@click.pass_context
@_guard
def gale(ctx, file, json_path, params, seed, width, tol, region):
    """Gale dual system: C, W, D, Q, forms, cone and equations."""
    from .analysis import gale_report, render_gale

    o = _opts(ctx, json_path, params, seed, width, tol)
    g = gale_report(_load(file), o["params"], region)
    if o["json"] != "-":
        click.echo(render_gale(g), nl=False)
    _emit_json(o["json"], g)


def _vector(text: str) -> list:
    try:
        vals = [parse_rate(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"malformed vector {text!r}") from None
    if any(isinstance(v, str) for v in vals):
        raise InputError(f"vector entries must be numbers: {text!r}")
    return vals


@main.command()
@click.argument("file")
@_common
@click.option("--at", "at", required=True, help="Steady state x1,...,xn.")
@click.pass_context
@_guard
def stability(ctx, file, json_path, params, seed, width, tol, at):
    """Stability of one steady state."""
    from .network import mass_action_system
    from .reports import StabilityModel
    from .stability import classify_state

    o = _opts(ctx, json_path, params, seed, width, tol)
    net = _load(file)
    system = mass_action_system(net, o["params"])
    x = _vector(at)
    if len(x) != net.n:
        raise InputError(f"--at needs {net.n} values")
    v = StabilityModel.of(classify_state(system, x, tol=o["tol"]))
    if o["json"] != "-":
        click.echo(f"{v.label} ({v.method})")
        for k, val in v.certificates.items():
            click.echo(f"  {k} = {val}")
    _emit_json(o["json"], v)
    if v.label in ("Degenerate", "Inconclusive"):
        ctx.exit(EXIT_DEGENERATE)


@main.command()
@click.argument("file")
@_common
@click.option("--x0", required=True, help="Initial state x1,...,xn.")
@click.option("--t-end", type=float, default=None, help="End time [1e4 dt].")
@click.option("--dt", type=float, default=None, help="Step [1e-3 / max outflow rate].")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.option("--every", type=int, default=1, help="Record every N-th step.")
@click.pass_context
@_guard
def simulate(ctx, file, json_path, params, seed, width, tol, x0, t_end, dt, csv_path, every):
    """Fixed-step RK4 trajectory (corroboration only)."""
    from .network import mass_action_system
    from .stability import simulate as run

    o = _opts(ctx, json_path, params, seed, width, tol)
    net = _load(file)
    x = [float(v) for v in _vector(x0)]
    if len(x) != net.n:
        raise InputError(f"--x0 needs {net.n} values")
    tr = run(mass_action_system(net, o["params"]), x, t_end, dt, record_every=every)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *net.species])
            for t, row in zip(tr.t, tr.x):
                w.writerow([f"{t:.10g}", *(f"{v:.12g}" for v in row)])
    end = ", ".join(f"{v:.10g}" for v in tr.x[-1])
    click.echo(f"t = {tr.t[-1]:.6g}: ({end})" + ("  [blew up]" if tr.blew_up else ""))


@main.command("find-multi")
@click.argument("file")
@_common
@click.option("--target", type=click.IntRange(1, 3), default=3)
@click.option("--strategy", type=click.Choice(["random", "constructive"]), default="random")
@click.option("--samples", type=int, default=1000)
@click.pass_context
@_guard
def find_multi(ctx, file, json_path, params, seed, width, tol, target, strategy, samples):
    """Search rate values giving TARGET steady states."""
    from .analysis import run_find_multi
    from .sampling import SamplingConfig

    o = _opts(ctx, json_path, params, seed, width, tol)
    cfg = SamplingConfig(seed=o["seed"] or 0, samples=samples, target=target)
    r = run_find_multi(_load(file), cfg, strategy)
    if o["json"] != "-":
        click.echo(f"target {target}: {'reachable' if r.reachable else 'unreachable'} ({r.reason})")
        for w in r.witnesses:
            pv = " ".join(f"--param {k}={v}" for k, v in sorted(w.params.items()))
            click.echo(f"  [{w.source}{'' if w.draw is None else ' #' + str(w.draw)}] {pv}")
    _emit_json(o["json"], r)


@main.command()
@click.option("--shapes", "shapes_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_common
@click.option("--samples", type=int, default=1000)
@click.option("--constructive/--no-constructive", default=True)
@click.pass_context
@_guard
def conjecture(ctx, shapes_path, json_path, params, seed, width, tol, samples, constructive):
    """Count roots over random rates for reversible shapes."""
    from .analysis import parse_shapes, run_conjecture

    o = _opts(ctx, json_path, params, seed, width, tol)
    shapes = parse_shapes(Path(shapes_path).read_text())
    r = run_conjecture(shapes, samples, o["seed"] or 0, constructive)
    if o["json"] != "-":
        for s in r.shapes:
            click.echo(f"{s.a}/{s.b}: max observed {s.max_count}, bound {s.bound}, "
                       f"histogram {s.histogram}, three-root witnesses {len(s.witnesses)}")
        click.echo(f"note: {r.note}")
    _emit_json(o["json"], r)
    if any(s.bound_violations for s in r.shapes):
        click.echo("error: a draw exceeded the proven bound", err=True)
        ctx.exit(EXIT_DEGENERATE)


@main.command("plot-data")
@click.argument("file")
@_common
@click.option("--points", type=int, default=200)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@_guard
def plot_data(ctx, file, json_path, params, seed, width, tol, points, csv_path):
    """CSV samples of h(y) and kappa*y for external plotting."""
    from .analysis import plot_data as run

    o = _opts(ctx, json_path, params, seed, width, tol)
    text = run(_load(file), o["params"], points)
    if csv_path:
        Path(csv_path).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("example", default="all")
@_common
@click.pass_context
def repro(ctx, example, json_path, params, seed, width, tol):
    """Re-run a bundled example (or all) and compare with stored values."""
    from .repro import EXAMPLES, render_repro, run_repro

    o = _opts(ctx, json_path, params, seed, width, tol)
    ids = list(EXAMPLES) if example == "all" else [example]
    if example != "all" and example not in EXAMPLES:
        raise InputError(f"unknown example {example!r}; valid: {', '.join(EXAMPLES)}")
    reports = [run_repro(i) for i in ids]
    if o["json"] != "-":
        for r in reports:
            click.echo(render_repro(r), nl=False)
    if o["json"]:
        from pydantic import TypeAdapter

        from .reports import ReproReport

        text = TypeAdapter(list[ReproReport]).dump_json(reports, indent=2).decode() + "\n"
        if o["json"] == "-":
            click.echo(text, nl=False)
        else:
            Path(o["json"]).write_text(text)
    if not all(r.passed for r in reports):
        ctx.exit(EXIT_DEGENERATE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
