"""Command-line front end: model selection, spectral runs, bounds, checks.

Exit codes: 0 success, 2 configuration error, 3 state-space/work guard
tripped, 4 iteration did not converge.  Default output is deterministic
(byte-identical across runs); wall-time logging is opt-in via --timing.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys as _sys
import time

import click
from mpmath import mp

from .bounds import (bound_report, lower_bound_open_2d, upper_bound_open_2d,
                     upper_bound_periodic_2d)
from .errors import CapacityLabError, CapacityLimitError, FormatError
from .graphs import (hard_square_system, load_system, monomer_dimer_system,
                     validate_system)
from .one_vertex import build_one_vertex_2d, build_one_vertex_3d
from .operators import (build_row_transfer_2d, build_slab_transfer_3d,
                        quadratic_form_count)
from .oracle import brute_count_box, brute_count_slanted_2d
from .spectral import IterationConfig, perron_radius
from .words import DEFAULT_STATE_LIMIT

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_NO_CONVERGENCE = 4

CSV_FIELDS = ["model", "op_kind", "geometry", "boundary", "precision",
              "value", "cw_lower", "cw_upper", "iterations", "seconds"]

BUILTIN_MODELS = [
    ("hard-square", "k=2, d=2: no two adjacent cells both occupied",
     lambda: hard_square_system(2)),
    ("hard-square-3d", "k=2, d=3: the same constraint on a cubic lattice",
     lambda: hard_square_system(3)),
    ("monomer-dimer-1d", "k=3, d=1: monomer-dimer tilings of a line",
     lambda: monomer_dimer_system(1)),
    ("monomer-dimer-2d", "k=5, d=2: monomer-dimer tilings of the plane",
     lambda: monomer_dimer_system(2)),
    ("monomer-dimer-3d", "k=7, d=3: monomer-dimer tilings of space",
     lambda: monomer_dimer_system(3)),
]


def _state_limit():
    raw = os.environ.get("CAPACITY_LAB_WORK_LIMIT")
    if raw is None:
        return DEFAULT_STATE_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(
            f"CAPACITY_LAB_WORK_LIMIT must be an integer, got {raw!r}")


def _resolve_model(model, model_file):
    if (model is None) == (model_file is None):
        raise click.UsageError("give exactly one of --model or --model-file")
    if model_file is not None:
        try:
            sys_ = load_system(model_file)
        except (OSError, FormatError) as exc:
            raise click.UsageError(f"cannot load model file: {exc}")
    else:
        for name, _desc, factory in BUILTIN_MODELS:
            if name == model:
                sys_ = factory()
                break
        else:
            known = ", ".join(name for name, _, _ in BUILTIN_MODELS)
            raise click.UsageError(f"unknown model {model!r}; builtins: {known}")
    report = validate_system(sys_)
    if not report.ok:
        bad = "; ".join(
            f"axis {r.axis}: isolated={r.isolated}, "
            f"union_of_sccs={r.union_of_sccs}"
            for r in report.per_axis if r.isolated or not r.union_of_sccs)
        raise click.UsageError(f"model {sys_.name!r} failed validation: {bad}")
    return sys_


def _build_operator(sys_, op, n, n1, n2, boundary, limit):
    if sys_.d == 1:
        if op != "standard":
            raise click.UsageError("1-axis models support --op standard only")
        from .spectral import as_operator
        return (as_operator(sys_.axis_graphs[0].adj.astype("int64")),
                "standard", "n=1", "open")
    if sys_.d == 2:
        if n is None:
            raise click.UsageError("2-axis models need --n")
        if op == "one-vertex":
            return build_one_vertex_2d(sys_, n, limit=limit), op, f"n={n}", "open"
        bc = "periodic" if op == "periodic" else "open"
        return (build_row_transfer_2d(sys_, n, bc, limit=limit),
                op, f"n={n}", bc)
    if sys_.d == 3:
        if n1 is None or n2 is None:
            raise click.UsageError("3-axis models need --n1 and --n2")
        if op == "one-vertex":
            return (build_one_vertex_3d(sys_, n1, n2, limit=limit),
                    op, f"n1={n1},n2={n2}", "open")
        if op == "periodic":
            bc = ("periodic", "periodic")
        elif boundary:
            parts = boundary.split(",")
            if len(parts) == 1:
                parts = parts * 2
            if len(parts) != 2 or any(p not in ("open", "periodic") for p in parts):
                raise click.UsageError(
                    f"--boundary must be open|periodic[,open|periodic], got {boundary!r}")
            bc = tuple(parts)
        else:
            bc = ("open", "open")
        return (build_slab_transfer_3d(sys_, n1, n2, bc, limit=limit),
                op, f"n1={n1},n2={n2}", ",".join(bc))
    raise click.UsageError(f"unsupported dimension d={sys_.d}")


def _fmt(x, digits):
    return mp.nstr(x, digits, strip_zeros=False)


def _emit(rows, fmt, out):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(rows, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _spectral_row(sys_, op_name, est, geometry, boundary, cfg, seconds):
    return {
        "model": sys_.name,
        "op_kind": op_name,
        "geometry": geometry,
        "boundary": boundary,
        "precision": cfg.precision_digits,
        "value": _fmt(est.value, cfg.precision_digits),
        "cw_lower": _fmt(est.cw_lower, cfg.precision_digits),
        "cw_upper": _fmt(est.cw_upper, cfg.precision_digits),
        "iterations": est.iterations,
        "seconds": "" if seconds is None else f"{seconds:.3f}",
    }


def _guard(fn):
    """Run fn, mapping library errors to the documented exit codes."""
    try:
        return fn()
    except CapacityLimitError as exc:
        click.echo(f"capacity guard: {exc} (estimate={exc.estimate}, "
                   f"limit={exc.limit})", err=True)
        _sys.exit(EXIT_GUARD)
    except (FormatError, ValueError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        _sys.exit(EXIT_CONFIG)


def _iteration_config(precision, tol, max_iter, checkpoint, resume):
    return IterationConfig(
        precision_digits=precision,
        tolerance=mp.mpf(tol) if tol else None,
        max_iterations=max_iter,
        checkpoint_path=checkpoint,
        resume=resume,
    )


spectral_options = [
    click.option("--model", default=None, help="builtin model name"),
    click.option("--model-file", default=None, type=click.Path(exists=True),
                 help="constraint system file"),
    click.option("--op", type=click.Choice(["standard", "periodic", "one-vertex"]),
                 default="standard", show_default=True),
    click.option("--n1", type=int, default=None, help="slab size, axis 1"),
    click.option("--n2", type=int, default=None, help="slab size, axis 2"),
    click.option("--boundary", default=None,
                 help="slab boundary, e.g. open,periodic"),
    click.option("--precision", type=int, default=40, show_default=True,
                 help="working precision in decimal digits"),
    click.option("--tol", default=None, help="relative enclosure tolerance"),
    click.option("--max-iter", type=int, default=100000, show_default=True),
    click.option("--checkpoint", default=None, type=click.Path(),
                 help="checkpoint file for long runs"),
    click.option("--resume", is_flag=True, help="resume from checkpoint"),
    click.option("--out", default=None, type=click.Path(), help="output file"),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                 default="csv", show_default=True),
    click.option("--workers", type=int, default=1, show_default=True,
                 help="reserved; the apply kernel is single-process"),
    click.option("--timing", is_flag=True,
                 help="include wall time (breaks byte-identical output)"),
]


def _with_options(opts):
    def deco(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return deco


@click.group()
def main():
    """Capacity of multi-dimensional constrained channels."""


@main.command("list-models")
def list_models():
    """Print the builtin constraint systems."""
    for name, desc, factory in BUILTIN_MODELS:
        sys_ = factory()
        click.echo(f"{name} (k={sys_.k}): {desc}")
    click.echo("file loader: --model-file <path> (see save_system format)")


@main.command()
@_with_options(spectral_options)
@click.option("--n", type=int, default=None, help="row width (2-axis models)")
def spectrum(model, model_file, op, n, n1, n2, boundary, precision, tol,
             max_iter, checkpoint, resume, out, fmt, workers, timing):
    """Compute the Perron radius of one transfer operator."""
    def run():
        sys_ = _resolve_model(model, model_file)
        cfg = _iteration_config(precision, tol, max_iter, checkpoint, resume)
        operator, op_name, geometry, bc = _build_operator(
            sys_, op, n, n1, n2, boundary, _state_limit())
        click.echo(f"states: {operator.dimension}", err=True)
        t0 = time.monotonic()
        est = perron_radius(operator, cfg)
        seconds = time.monotonic() - t0 if timing else None
        click.echo(f"iterations: {est.iterations}", err=True)
        if not est.converged:
            click.echo(f"did not converge within {cfg.max_iterations} "
                       f"iterations (gap {est.cw_upper - est.cw_lower})",
                       err=True)
            _emit([_spectral_row(sys_, op_name, est, geometry, bc, cfg,
                                 seconds)], fmt, out)
            _sys.exit(EXIT_NO_CONVERGENCE)
        _emit([_spectral_row(sys_, op_name, est, geometry, bc, cfg, seconds)],
              fmt, out)
    _guard(run)


def _parse_range(spec):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise click.UsageError(f"bad range {spec!r}")
    try:
        return [int(x) for x in spec.split(",")]
    except ValueError:
        raise click.UsageError(f"bad range {spec!r}")


@main.command()
@_with_options(spectral_options)
@click.option("--n", "n_range", default=None,
              help="size range, e.g. 2..12 or 3,5,7")
def sweep(model, model_file, op, n_range, n1, n2, boundary, precision, tol,
          max_iter, checkpoint, resume, out, fmt, workers, timing):
    """Compute Perron radii over a range of sizes (--n like 2..12 or 3,5,7)."""
    if n_range is None:
        raise click.UsageError("sweep needs --n as a range, e.g. --n 2..12")
    sizes = _parse_range(n_range)

    def run():
        sys_ = _resolve_model(model, model_file)
        cfg = _iteration_config(precision, tol, max_iter, None, False)
        rows = []
        for size in sizes:
            operator, op_name, geometry, bc = _build_operator(
                sys_, op, size, n1, n2, boundary, _state_limit())
            t0 = time.monotonic()
            est = perron_radius(operator, cfg)
            seconds = time.monotonic() - t0 if timing else None
            if not est.converged:
                click.echo(f"n={size}: did not converge", err=True)
                _sys.exit(EXIT_NO_CONVERGENCE)
            rows.append(_spectral_row(sys_, op_name, est, geometry, bc, cfg,
                                      seconds))
        _emit(rows, fmt, out)
    _guard(run)


@main.command()
@click.option("--model", default=None)
@click.option("--model-file", default=None, type=click.Path(exists=True))
@click.option("--n", type=int, required=True,
              help="largest row width used (even; upper bound uses T_{n,per})")
@click.option("--p", type=int, default=1, show_default=True,
              help="width difference in the lower-bound ratio")
@click.option("--precision", type=int, default=40, show_default=True)
@click.option("--out", default=None, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text", show_default=True)
def bounds(model, model_file, n, p, precision, out, fmt):
    """Assemble rigorous lower/upper capacity bounds for a 2-axis model."""
    def run():
        sys_ = _resolve_model(model, model_file)
        if sys_.d != 2:
            raise click.UsageError("bounds currently supports 2-axis models")
        if n % 2 != 0:
            raise click.UsageError("--n must be even (periodic upper bound)")
        cfg = IterationConfig(precision_digits=precision)
        limit = _state_limit()
        est_big = perron_radius(build_row_transfer_2d(sys_, n, "open",
                                                      limit=limit), cfg)
        est_small = perron_radius(build_row_transfer_2d(sys_, n - p, "open",
                                                        limit=limit), cfg)
        est_per = perron_radius(build_row_transfer_2d(sys_, n, "periodic",
                                                      limit=limit), cfg)
        report = bound_report([
            lower_bound_open_2d(est_big, est_small, p, digits=precision),
            upper_bound_open_2d(est_big, n, digits=precision),
            upper_bound_periodic_2d(est_per, n, digits=precision),
        ])
        text = report.to_json() + "\n" if fmt == "json" else report.to_text() + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    _guard(run)


@main.command("oracle-check")
@click.option("--model", default=None)
@click.option("--model-file", default=None, type=click.Path(exists=True))
@click.option("--max-n", type=int, default=4, show_default=True,
              help="largest width/length in the counting identities")
def oracle_check(model, model_file, max_n):
    """Verify operator power counts against brute-force enumeration."""
    def run():
        sys_ = _resolve_model(model, model_file)
        if sys_.d != 2:
            raise click.UsageError("oracle-check currently supports 2-axis models")
        limit = _state_limit()
        failures = 0
        for n in range(2, max_n + 1):
            for q in range(2, max_n + 1):
                t_op = build_row_transfer_2d(sys_, n, "open", limit=limit)
                got = quadratic_form_count(t_op, q - 1)
                want = brute_count_box(sys_, (n, q)).value
                ok = got == want
                failures += not ok
                click.echo(f"standard n={n} q={q}: operator {got} "
                           f"oracle {want} {'ok' if ok else 'FAIL'}")
                s_op = build_one_vertex_2d(sys_, n, limit=limit)
                got1 = quadratic_form_count(s_op, (q - 1) * n)
                want1 = brute_count_slanted_2d(sys_, n, q).value
                ok1 = got1 == want1
                failures += not ok1
                click.echo(f"one-vertex n={n} q={q}: operator {got1} "
                           f"oracle {want1} {'ok' if ok1 else 'FAIL'}")
        if failures:
            click.echo(f"{failures} identity check(s) failed", err=True)
            _sys.exit(1)
        click.echo("all counting identities hold")
    _guard(run)


if __name__ == "__main__":
    main()
