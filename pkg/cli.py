"""
Command-line interface for the chocolate-bar solver and theorem checks.

Exit codes: 0 success / consistent with the theorem, 1 counterexample or
inconclusive, 2 usage or parse error, 3 invalid position.
"""
import sys
from typing import List, Optional

import click

import chocolate
import fdsl
import nimpass
import nsprop
import verify
from config import Config, setup_logging
from core import GrundyTable, grundy
from errors import ArityError, ChocolateError, EnumerationCapError, InvalidPositionError, UnsupportedDimensionError
from reports.models import GrundyEntry, GrundyTablePayload, Verdict
from reports.writers import envelope_json, grundy_csv, heights_csv, make_envelope, mismatch_csv, written_columns

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_INVALID_POSITION = 3


def _int_list(text: str, what: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers, got {text!r}")
    if not values or any(v < 0 for v in values):
        raise click.BadParameter(f"{what} must be nonnegative integers, got {text!r}")
    return values


def _fail(ctx: click.Context, message: str, code: int) -> None:
    click.secho(f"❌ {message}", err=True, fg="red")
    ctx.exit(code)


def _parse_fn(ctx: click.Context, text: str, arity: Optional[int]) -> fdsl.FunctionSpec:
    try:
        return fdsl.parse(text, arity)
    except (fdsl.ParseError, ArityError) as e:
        _fail(ctx, str(e), EXIT_USAGE)


def _command_echo(ctx: click.Context) -> List[str]:
    words = [ctx.command_path]
    for name, value in sorted(ctx.params.items()):
        if value is not None and value is not False:
            words.append(f"--{name.replace('_', '-')}={value}")
    return words


def _show_progress(ctx: click.Context) -> bool:
    return not ctx.obj.get("quiet") and sys.stderr.isatty()


def _position(ctx: click.Context, game: chocolate.ChocGame, pos: str) -> chocolate.ChocPosition:
    coords = _int_list(pos, "--pos")
    try:
        p = chocolate.from_written_coords(game.s, coords)
        game.validate(p)
    except ArityError as e:
        _fail(ctx, str(e), EXIT_USAGE)
    except InvalidPositionError as e:
        invariant = f" (violates {e.invariant})" if e.invariant else ""
        _fail(ctx, f"invalid position {tuple(coords)}: {e}{invariant}", EXIT_INVALID_POSITION)
    return p


@click.group()
@click.option("--log-level", default=None, help="Overrides CHOC_LOG.")
@click.option("--quiet", is_flag=True, help="Hide progress bars.")
@click.pass_context
def cli(ctx, log_level, quiet):
    """Grundy values and NS checks for multi-dimensional chocolate bars."""
    setup_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet


@cli.command("grundy")
@click.option("--fn", "fn_text", required=True, help="Height function, e.g. 'max(x1/2, x2/2)'.")
@click.option("--arity", type=click.IntRange(min=1), default=None, help="Base dimension s.")
@click.option("--pos", required=True, help="Coordinates in written order: y,z | x,y,z | x1..xs,y.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def cmd_grundy(ctx, fn_text, arity, pos, as_json):
    """Print the Grundy value of one position."""
    game = chocolate.ChocGame(_parse_fn(ctx, fn_text, arity))
    p = _position(ctx, game, pos)
    value = grundy(game, p, GrundyTable())
    if as_json:
        payload = GrundyTablePayload(
            game=game.describe(),
            columns=written_columns(game.s),
            entries=[GrundyEntry(position=list(chocolate.to_written_coords(p)), grundy=value)],
        )
        click.echo(envelope_json(make_envelope(_command_echo(ctx), payload)))
    else:
        click.echo(value)


@cli.command("moves")
@click.option("--fn", "fn_text", required=True)
@click.option("--arity", type=click.IntRange(min=1), default=None)
@click.option("--pos", required=True)
@click.pass_context
def cmd_moves(ctx, fn_text, arity, pos):
    """List every position reachable in one cut."""
    game = chocolate.ChocGame(_parse_fn(ctx, fn_text, arity))
    p = _position(ctx, game, pos)
    for q in sorted(chocolate.to_written_coords(q) for q in game.moves(p)):
        click.echo(",".join(map(str, q)))


@cli.command("check-ns")
@click.option("--fn", "fn_text", required=True, help="Unary expression in x1.")
@click.option("--bound", type=click.IntRange(min=0), default=Config.NS_BOUND, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def cmd_check_ns(ctx, fn_text, bound, as_json):
    """Bounded NS property check with a witness on failure."""
    spec = _parse_fn(ctx, fn_text, None)
    if spec.arity != 1:
        _fail(ctx, f"check-ns needs a unary function (arity must be 1), {fn_text!r} has arity {spec.arity}", EXIT_USAGE)
    report = nsprop.check_ns(spec, bound)
    if as_json:
        click.echo(envelope_json(make_envelope(_command_echo(ctx), report)))
        return
    click.echo(f"{report.function}: {report.label}")
    if report.witness:
        w = report.witness
        click.echo(f"witness (z, z', i) = ({w.z}, {w.z_prime}, {w.i}); h = ({w.h_z}, {w.h_z_prime})")


@cli.command("verify")
@click.option("--fn", "fn_text", default=None)
@click.option("--arity", type=click.IntRange(min=1), default=None)
@click.option("--bounds", default=None, help="Per-axis bounds, e.g. 16,16.")
@click.option("--mode", type=click.Choice(["sweep", "sufficiency", "necessity", "biconditional"]), default="sweep", show_default=True)
@click.option("--y-cap", type=click.IntRange(min=0), default=None)
@click.option("--enum-d", type=click.IntRange(min=0), default=Config.ENUM_D, show_default=True)
@click.option("--enum-v", type=click.IntRange(min=0), default=Config.ENUM_V, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=Config.JOBS, show_default=True)
@click.option("--seed", type=int, default=Config.SEED, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True, help="Print the mismatch table.")
@click.pass_context
def cmd_verify(ctx, fn_text, arity, bounds, mode, y_cap, enum_d, enum_v, jobs, seed, as_json, as_csv):
    """Grundy-versus-nim-sum sweeps and the NS theorems."""
    progress = _show_progress(ctx)
    try:
        if mode == "biconditional":
            report = verify.verify_biconditional(enum_d, enum_v, jobs=jobs)
            columns = written_columns(1)
        else:
            if fn_text is None or bounds is None:
                raise click.UsageError(f"--mode {mode} needs --fn and --bounds")
            spec = _parse_fn(ctx, fn_text, arity)
            axis_bounds = _int_list(bounds, "--bounds")
            if len(axis_bounds) != spec.arity:
                _fail(ctx, f"{len(axis_bounds)} bounds given for arity {spec.arity}", EXIT_USAGE)
            columns = written_columns(spec.arity)
            if mode == "sweep":
                game = chocolate.ChocGame(spec, axis_bounds)
                report = verify.sweep_grundy_vs_nimsum(game, axis_bounds, y_cap, progress=progress, jobs=jobs)
            elif mode == "sufficiency":
                report = verify.verify_sufficiency(spec, axis_bounds, y_cap, progress=progress, jobs=jobs)
            else:
                report = verify.verify_necessity(spec, axis_bounds, y_cap, progress=progress, jobs=jobs)
    except EnumerationCapError as e:
        _fail(ctx, str(e), EXIT_USAGE)
    report.seed = seed
    if as_json:
        click.echo(envelope_json(make_envelope(_command_echo(ctx), report)))
    elif as_csv:
        click.echo(mismatch_csv(report, columns), nl=False)
    else:
        _print_report(report)
    ctx.exit(EXIT_OK if report.verdict == Verdict.CONSISTENT else EXIT_COUNTEREXAMPLE)


def _print_report(report) -> None:
    colour = "green" if report.verdict == Verdict.CONSISTENT else "yellow"
    click.secho(f"{report.kind}: {report.game} -> {report.verdict.value}", fg=colour)
    click.echo(f"positions checked: {report.positions_checked}, mismatches: {report.mismatch_total}")
    if report.ns_holds is not None:
        failing = [r for r in report.ns_summary if not r.holds_on_bound]
        click.echo(f"slices: {len(report.ns_summary)} checked, {len(failing)} failing NS")
    for m in report.mismatches[:5]:
        click.echo(f"  witness {tuple(m.position)}: grundy={m.grundy}, nim-sum={m.nim_sum}, oracle={m.oracle_verified}")
    if report.classifications:
        click.echo(f"functions classified: {len(report.classifications)}")
    for note in report.notes:
        click.echo(f"  {note}")


@cli.command("nim-pass")
@click.option("--piles", "k", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--t", "t", type=click.IntRange(min=0), required=True)
@click.option("--bounds", "bound", type=click.IntRange(min=0), default=16, show_default=True, help="Largest pile size.")
@click.option("--isomorphism", is_flag=True, help="Also compare with the chocolate encoding.")
@click.option("--all", "all_states", is_flag=True, help="CSV lists every state, not only P-positions.")
@click.option("--jobs", type=click.IntRange(min=1), default=Config.JOBS, show_default=True)
@click.option("--seed", type=int, default=Config.SEED, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True)
@click.pass_context
def cmd_nim_pass(ctx, k, t, bound, isomorphism, all_states, jobs, seed, as_json, as_csv):
    """Check the parity-of-t characterization of pass-Nim P-positions."""
    k = int(k)
    report = nimpass.verify_pass_theorem(t, k, bound, jobs=jobs)
    report.seed = seed
    ok = report.verdict == Verdict.CONSISTENT
    iso = None
    if isomorphism:
        iso = nimpass.verify_isomorphism(t, k, bound, seed=seed)
        ok = ok and iso.verdict == Verdict.CONSISTENT
    if as_csv:
        click.echo(grundy_csv(nimpass.p_positions(t, k, bound, only_p=not all_states)), nl=False)
    elif as_json:
        extra = {"isomorphism": iso.model_dump(mode="json")} if iso else {}
        click.echo(envelope_json(make_envelope(_command_echo(ctx), report, **extra)))
    else:
        click.echo(report.notes[0])
        _print_report(report)
        if iso:
            _print_report(iso)
    ctx.exit(EXIT_OK if ok else EXIT_COUNTEREXAMPLE)


@cli.command("render")
@click.option("--fn", "fn_text", default=None)
@click.option("--arity", type=click.IntRange(min=1), default=None)
@click.option("--pos", default=None)
@click.option("--nim-pass", "nim_t", type=click.IntRange(min=0), default=None, help="Draw the pass encoding for threshold t.")
@click.option("--bounds", "bound", type=click.IntRange(min=0), default=6, show_default=True)
@click.option("--csv", "as_csv", is_flag=True, help="Height matrix instead of ASCII.")
@click.pass_context
def cmd_render(ctx, fn_text, arity, pos, nim_t, bound, as_csv):
    """Draw a bar (2D side view, 3D top view) or dump its column heights."""
    if nim_t is not None:
        game = nimpass.encode_as_chocolate(nim_t, 2)
        p = chocolate.ChocPosition((bound, bound), 1)
    else:
        if fn_text is None or pos is None:
            raise click.UsageError("render needs --fn and --pos, or --nim-pass")
        game = chocolate.ChocGame(_parse_fn(ctx, fn_text, arity))
        p = _position(ctx, game, pos)
    try:
        bar = chocolate.column_heights(game, p)
    except UnsupportedDimensionError as e:
        _fail(ctx, str(e), EXIT_USAGE)
    if as_csv:
        click.echo(heights_csv(bar.heights), nl=False)
    else:
        click.echo(chocolate.render_ascii(game, p))


def main():
    try:
        cli(obj={})
    except ChocolateError as e:
        click.secho(f"❌ {e}", err=True, fg="red")
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
