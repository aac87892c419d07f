"""
Theorem sweeps: Grundy value against the nim-sum of the coordinates,
sufficiency and necessity of the NS condition on slices, and the
monotone-table enumeration experiment for 2D bars.
"""
import itertools
import logging
from math import comb
from typing import Hashable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

import fdsl
import nsprop
from chocolate import ChocGame, ChocPosition, coordinate_nim_sum, to_written_coords, valid_positions
from config import Config
from core import GrundyTable, ImpartialGame, grundy, naive_grundy, smaller_values_reachable
from errors import ArityError, EnumerationCapError, StateSpaceExceeded
from reports.models import Mismatch, TableClassification, Verdict, VerificationReport

logger = logging.getLogger("chocolate.verify")

MAX_LISTED_MISMATCHES = 20
# oracle attempts per report, confirmed or not
MAX_WITNESS_ATTEMPTS = 3 * MAX_LISTED_MISMATCHES


class Witness(NamedTuple):
    position: Hashable
    grundy: int
    size: int


class WitnessSelection(NamedTuple):
    confirmed: List[Witness]
    unconfirmed: int
    refuted: List[Witness]

    def notes(self, total: int) -> List[str]:
        out = []
        if total > len(self.confirmed):
            out.append(f"{total} mismatches, {len(self.confirmed)} listed after oracle re-derivation")
        if self.unconfirmed:
            out.append(f"{self.unconfirmed} witnesses exceeded the oracle budget and are not listed")
        if self.refuted:
            out.append(f"oracle disagrees with the engine at {[w.position for w in self.refuted]}")
        return out


def _oracle_confirms(game: ImpartialGame, p, grundy_value: int, max_nodes: Optional[int] = None) -> Optional[bool]:
    try:
        return naive_grundy(game, p, max_nodes=max_nodes) == grundy_value
    except StateSpaceExceeded:
        logger.info("oracle budget exhausted re-checking %s", p)
        return None


def confirm_witnesses(game: ImpartialGame, found: Sequence[Witness], max_nodes: Optional[int] = None) -> WitnessSelection:
    """
    Re-derive witnesses with the naive oracle, smallest first, until
    MAX_LISTED_MISMATCHES are confirmed or MAX_WITNESS_ATTEMPTS are spent.
    """
    max_nodes = Config.WITNESS_MAX_NODES if max_nodes is None else max_nodes
    confirmed, refuted, unconfirmed = [], [], 0
    ordered = sorted(enumerate(found), key=lambda item: (item[1].size, item[0]))
    for _, witness in ordered[:MAX_WITNESS_ATTEMPTS]:
        if len(confirmed) == MAX_LISTED_MISMATCHES:
            break
        verdict = _oracle_confirms(game, witness.position, witness.grundy, max_nodes)
        if verdict is None:
            unconfirmed += 1
        elif verdict:
            confirmed.append(witness)
        else:
            logger.error("engine and oracle disagree at %s", witness.position)
            refuted.append(witness)
    return WitnessSelection(confirmed, unconfirmed, refuted)


def _slab_positions(game: ChocGame, bounds: Sequence[int], y_cap: Optional[int], first: int) -> Iterator[ChocPosition]:
    for rest in fdsl.product_box(bounds[1:]):
        base = (first,) + tuple(rest)
        top = game.f(base)
        if y_cap is not None:
            top = min(top, y_cap)
        for y in range(top + 1):
            yield ChocPosition(base, y)


def _sweep_slab(
    game: ChocGame, bounds: Sequence[int], y_cap: Optional[int], first: int, memo: Optional[GrundyTable] = None
) -> Tuple[int, List[Witness]]:
    """Positions with base[0] == first; a fresh memo unless one is shared."""
    memo = memo if memo is not None else GrundyTable()
    count, found = 0, []
    for p in _slab_positions(game, bounds, y_cap, first):
        count += 1
        value = grundy(game, p, memo)
        if value != coordinate_nim_sum(p):
            found.append(Witness(p, value, sum(p.base) + p.y))
    return count, found


def sweep_grundy_vs_nimsum(
    game: ChocGame,
    bounds: Sequence[int],
    y_cap: Optional[int] = None,
    memo: Optional[GrundyTable] = None,
    check_witnesses: bool = True,
    progress: bool = False,
    jobs: int = 1,
) -> VerificationReport:
    """
    Compare G(p) with the nim-sum of all s+1 coordinates on every valid p in bounds.

    With ``jobs`` > 1 each slab base[0] = c goes to a worker with its own memo;
    slabs are merged in order, so the report does not depend on ``jobs``.
    Listed mismatches are the ones the naive oracle re-derives.
    """
    if len(bounds) != game.s:
        raise ArityError(f"{len(bounds)} bounds given for a game with s={game.s}")
    slabs = range(bounds[0] + 1)
    if jobs > 1:
        parts = Parallel(n_jobs=jobs)(delayed(_sweep_slab)(game, bounds, y_cap, c) for c in slabs)
    else:
        memo = memo if memo is not None else GrundyTable()
        parts = [
            _sweep_slab(game, bounds, y_cap, c, memo)
            for c in tqdm(slabs, desc=f"sweep {game.name}", disable=not progress, leave=False)
        ]
    checked = sum(count for count, _ in parts)
    found = [w for _, part in parts for w in part]
    total = len(found)
    if check_witnesses:
        selection = confirm_witnesses(game, found)
        listed, notes = selection.confirmed, selection.notes(total)
    else:
        listed, notes = found[:MAX_LISTED_MISMATCHES], []
    mismatches = [
        Mismatch(
            position=list(to_written_coords(w.position)),
            grundy=w.grundy,
            nim_sum=coordinate_nim_sum(w.position),
            oracle_verified=True if check_witnesses else None,
        )
        for w in listed
    ]
    logger.info("%s: %d positions, %d mismatches", game.describe(), checked, total)
    return VerificationReport(
        kind="sweep",
        game=game.describe(),
        function=game.F.text,
        s=game.s,
        bounds=list(bounds),
        y_cap=y_cap,
        positions_checked=checked,
        mismatches=mismatches,
        mismatch_total=total,
        verdict=Verdict.CONSISTENT if total == 0 else Verdict.COUNTEREXAMPLE,
        notes=notes,
    )


def verify_sufficiency(
    F: fdsl.FunctionSpec, bounds: Sequence[int], y_cap: Optional[int] = None, progress: bool = False, jobs: int = 1
) -> VerificationReport:
    """NS on every slice within bounds must give zero mismatches."""
    slices = nsprop.check_all_slices(F, bounds, jobs=jobs)
    ns_holds = nsprop.all_hold(slices)
    report = sweep_grundy_vs_nimsum(ChocGame(F, bounds), bounds, y_cap, progress=progress, jobs=jobs)
    report.kind = "sufficiency"
    report.ns_summary = slices
    report.ns_holds = ns_holds
    if ns_holds:
        report.notes.append(f"all slices hold up to their bounds; {report.mismatch_total} mismatches")
    else:
        report.verdict = Verdict.CONSISTENT
        report.notes.append("some slice fails NS: sufficiency is vacuous on these bounds")
    return report


def verify_necessity(
    F: fdsl.FunctionSpec,
    bounds: Sequence[int],
    y_cap: Optional[int] = None,
    escalate: bool = True,
    progress: bool = False,
    jobs: int = 1,
) -> VerificationReport:
    """
    Contrapositive search: a slice failing NS predicts a position whose Grundy
    value differs from the nim-sum. Without a witness the bounds are doubled
    once before the result is called inconclusive.
    """
    slices = nsprop.check_all_slices(F, bounds, jobs=jobs)
    ns_holds = nsprop.all_hold(slices)
    report = sweep_grundy_vs_nimsum(ChocGame(F, bounds), bounds, y_cap, progress=progress, jobs=jobs)
    report.kind = "necessity"
    report.ns_summary = slices
    report.ns_holds = ns_holds
    if ns_holds:
        report.verdict = Verdict.CONSISTENT
        report.notes.append("all slices hold: necessity is vacuous on these bounds")
        return report
    if report.mismatch_total:
        report.verdict = Verdict.CONSISTENT
        report.notes.append("slice failure matched by a Grundy/nim-sum witness")
        return report
    if escalate:
        wider = [2 * b for b in bounds]
        logger.info("no witness within %s, escalating to %s", list(bounds), wider)
        retry = verify_necessity(F, wider, y_cap, escalate=False, progress=progress, jobs=jobs)
        retry.notes.insert(0, f"escalated from bounds {list(bounds)}")
        return retry
    report.verdict = Verdict.INCONCLUSIVE
    report.notes.append("slice failure but no witness within the escalated bounds")
    return report


def enumerate_monotone_functions(domain_bound: int, value_bound: int, cap: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Every nondecreasing table [0..D] -> [0..V], lexicographically."""
    cap = cap if cap is not None else Config.ENUM_CAP
    count = monotone_table_count(domain_bound, value_bound)
    if count > cap:
        raise EnumerationCapError(f"{count} monotone tables for D={domain_bound}, V={value_bound} exceed the cap of {cap}")
    return itertools.combinations_with_replacement(range(value_bound + 1), domain_bound + 1)


def monotone_table_count(domain_bound: int, value_bound: int) -> int:
    return comb(domain_bound + value_bound + 1, value_bound)


def _classify(tables: List[Tuple[int, ...]], domain_bound: int) -> List[Tuple[TableClassification, int]]:
    out = []
    for table in tables:
        h = fdsl.table_function(table)
        ns = nsprop.check_ns(h, domain_bound).holds_on_bound
        sweep = sweep_grundy_vs_nimsum(ChocGame(h, (domain_bound,)), (domain_bound,), check_witnesses=False)
        out.append((TableClassification(table=list(table), ns_holds=ns, sweep_clean=sweep.mismatch_total == 0), sweep.positions_checked))
    return out


def verify_biconditional(
    domain_bound: int = Config.ENUM_D,
    value_bound: int = Config.ENUM_V,
    jobs: int = 1,
    chunk: int = 32,
) -> VerificationReport:
    """Bounded NS (B = D) against a clean 2D sweep (z <= D), table by table."""
    tables = list(enumerate_monotone_functions(domain_bound, value_bound))
    chunks = [tables[i:i + chunk] for i in range(0, len(tables), chunk)]
    if jobs > 1:
        parts = Parallel(n_jobs=jobs)(delayed(_classify)(c, domain_bound) for c in chunks)
    else:
        parts = [_classify(c, domain_bound) for c in chunks]
    rows = [row for part in parts for row in part]
    classifications = [c for c, _ in rows]
    asymmetric = [c for c in classifications if not c.agrees]
    notes = [f"{len(classifications)} tables, {sum(c.ns_holds for c in classifications)} with NS"]
    notes.extend(f"asymmetry at table {c.table}: ns={c.ns_holds}, sweep_clean={c.sweep_clean}" for c in asymmetric)
    return VerificationReport(
        kind="biconditional",
        game=f"CB(h, y, z) for monotone h:[0..{domain_bound}]->[0..{value_bound}]",
        s=1,
        bounds=[domain_bound],
        positions_checked=sum(n for _, n in rows),
        classifications=classifications,
        verdict=Verdict.CONSISTENT if not asymmetric else Verdict.COUNTEREXAMPLE,
        notes=notes,
    )


def check_reachability(game, table: GrundyTable) -> List:
    """Positions where some smaller Grundy value has no option realising it."""
    return [p for p in list(table) if not smaller_values_reachable(game, p, table)]


def check_oracle_agreement(game: ChocGame, bounds: Sequence[int], y_cap: Optional[int] = None) -> List[Tuple]:
    """(position, engine, oracle) for every disagreement; empty when they agree."""
    memo = GrundyTable()
    bad = []
    for p in valid_positions(game, bounds, y_cap):
        engine = grundy(game, p, memo)
        oracle = naive_grundy(game, p)
        if engine != oracle:
            bad.append((p, engine, oracle))
    return bad
