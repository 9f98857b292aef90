"""Iterated elimination: fast maximal steps, scripted paths, traces.

A fast step removes, for every player at once, everything the operator's
condition currently marks as dominated. A scripted path removes exactly
the sets a script names, validating each step against the operator.

Validation tests the dominator condition with opponents taken before the
step for ARROW and after it for TAIL and DOUBLE; DOUBLE draws dominators
from the player's own set as it stood when the step began (minus the
removed strategy itself), so strategies removed together may lean on one
another. Each executed step also records an audit flag telling whether
the removals satisfy the operator's condition re-evaluated purely on the
produced pairing; simultaneous removals that prop each other up show up
there as a False.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .games import Game, GameError
from .intervals import IntervalSet, IntervalSetParseError, parse_interval_set
from .engine import (
    Factor,
    Operator,
    Pairing,
    eliminated_region,
    factor_is_empty,
    full_pairing,
    _region_where,
)


class TraceStatus(Enum):
    CONVERGED = "CONVERGED"
    CAPPED = "CAPPED"
    VACUOUS = "VACUOUS"


@dataclass
class ReductionTrace:
    game_name: str
    op: Operator
    kind: str  # "fast" or "path"
    stages: tuple[Pairing, ...]
    eliminated: tuple[tuple[Factor, ...], ...]
    status: TraceStatus
    fast_condition_audit: tuple[bool, ...]
    path_valid: tuple[bool, ...] | None = None

    @property
    def final(self) -> Pairing:
        return self.stages[-1]


class InvalidRemoval(GameError):
    def __init__(self, player: int, witness, message: str):
        super().__init__(message)
        self.player = player
        self.witness = witness


class PathScriptError(GameError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _factor_minus(a: Factor, b: Factor) -> Factor:
    if isinstance(a, IntervalSet):
        return a.difference(b)
    return a - b


def _factor_subset(a: Factor, b: Factor) -> bool:
    if isinstance(a, IntervalSet):
        return a.is_subset(b)
    return a <= b


def _witness_outside(game: Game, i: int, removed: Factor, region: Factor):
    bad = _factor_minus(removed, region)
    if isinstance(bad, IntervalSet):
        return bad.pick()
    order = {s: k for k, s in enumerate(game.labels(i))}
    return min(bad, key=order.__getitem__)


def _empty_like(f: Factor) -> Factor:
    return IntervalSet.empty() if isinstance(f, IntervalSet) else frozenset()


def _step_regions(
    game: Game, pre: Pairing, post: Pairing, removals: dict[int, Factor], op: Operator
) -> dict[int, Factor]:
    """Region of each removal set satisfying the operator's path condition."""
    out = {}
    for i, removed in removals.items():
        if op is Operator.ARROW:
            out[i] = _region_where(game, pre, i, domain=removed)
        elif op is Operator.TAIL:
            out[i] = _region_where(game, post, i, domain=removed)
        else:
            out[i] = _region_where(
                game, post, i, domain=removed, member=pre[i], exclude_self=True
            )
    return out


def _audit_step(
    game: Game, post: Pairing, removals: dict[int, Factor], op: Operator, pre: Pairing
) -> bool:
    """Literal operator condition on the produced pairing, per removed point."""
    for i, removed in removals.items():
        if factor_is_empty(removed):
            continue
        if op is Operator.ARROW:
            region = _region_where(game, pre, i, domain=removed)
        elif op is Operator.TAIL:
            region = _region_where(game, post, i, domain=removed)
        else:
            region = _region_where(game, post, i, domain=removed, member=post[i])
        if not _factor_subset(removed, region):
            return False
    return True


def fast_step(
    game: Game, h: Pairing, op: Operator
) -> tuple[Pairing, tuple[Factor, ...], bool]:
    """Remove every currently eliminable strategy of every player at once."""
    removed = tuple(eliminated_region(game, h, i, op) for i in range(game.n))
    new = tuple(_factor_minus(h[i], removed[i]) for i in range(game.n))
    removals = {i: removed[i] for i in range(game.n)}
    audit = _audit_step(game, new, removals, op, pre=h)
    return new, removed, audit


def star_reduce(game: Game, op: Operator, max_iters: int = 1000) -> ReductionTrace:
    """Iterate fast steps to a fixpoint, an empty factor, or the cap."""
    stages = [full_pairing(game)]
    eliminated: list[tuple[Factor, ...]] = []
    audits: list[bool] = []
    status = TraceStatus.CAPPED
    for _ in range(max_iters):
        new, removed, audit = fast_step(game, stages[-1], op)
        if new == stages[-1]:
            status = TraceStatus.CONVERGED
            break
        stages.append(new)
        eliminated.append(removed)
        audits.append(audit)
        if any(factor_is_empty(f) for f in new):
            status = TraceStatus.VACUOUS
            break
    return ReductionTrace(
        game_name=game.name,
        op=op,
        kind="fast",
        stages=tuple(stages),
        eliminated=tuple(eliminated),
        status=status,
        fast_condition_audit=tuple(audits),
    )


def path_step(
    game: Game,
    h: Pairing,
    op: Operator,
    removals: dict[int, Factor],
    validate: bool = True,
) -> tuple[Pairing, bool, bool]:
    """Apply one scripted removal step; returns (pairing, audit, valid).

    With validate on, an invalid removal raises InvalidRemoval naming a
    witness strategy. Subset violations always raise.
    """
    for i, removed in removals.items():
        if not _factor_subset(removed, h[i]):
            witness = _witness_outside(game, i, removed, h[i])
            raise InvalidRemoval(
                i + 1,
                witness,
                f"player {i + 1}: removal of {witness} is outside the "
                "current strategy set",
            )
    new = list(h)
    for i, removed in removals.items():
        new[i] = _factor_minus(h[i], removed)
    post = tuple(new)
    regions = _step_regions(game, h, post, removals, op)
    valid = True
    for i, removed in removals.items():
        if not _factor_subset(removed, regions[i]):
            valid = False
            if validate:
                witness = _witness_outside(game, i, removed, regions[i])
                raise InvalidRemoval(
                    i + 1,
                    witness,
                    f"player {i + 1}: strategy {witness} is not eliminable "
                    f"under {op.value}",
                )
    audit = _audit_step(game, post, removals, op, pre=h)
    return post, audit, valid


def run_path(
    game: Game,
    op: Operator,
    steps: list[dict[int, Factor]],
    validate: bool = True,
) -> ReductionTrace:
    """Execute a parsed script. With validate off the steps are applied as
    bare restrictions and per-step validity is only recorded."""
    stages = [full_pairing(game)]
    eliminated: list[tuple[Factor, ...]] = []
    audits: list[bool] = []
    valids: list[bool] = []
    for removals in steps:
        h = stages[-1]
        post, audit, valid = path_step(game, h, op, removals, validate=validate)
        removed_row = tuple(
            removals.get(i, _empty_like(h[i])) for i in range(game.n)
        )
        stages.append(post)
        eliminated.append(removed_row)
        audits.append(audit)
        valids.append(valid)
        if any(factor_is_empty(f) for f in post):
            break
    final = stages[-1]
    if any(factor_is_empty(f) for f in final):
        status = TraceStatus.VACUOUS
    elif is_maximal(game, final, op):
        status = TraceStatus.CONVERGED
    else:
        # a script that stops short of a fixpoint ran out of steps
        status = TraceStatus.CAPPED
    return ReductionTrace(
        game_name=game.name,
        op=op,
        kind="path",
        stages=tuple(stages),
        eliminated=tuple(eliminated),
        status=status,
        fast_condition_audit=tuple(audits),
        path_valid=tuple(valids),
    )


def is_maximal(game: Game, h: Pairing, op: Operator) -> bool:
    """True when no player has anything left to eliminate at h."""
    return all(
        factor_is_empty(eliminated_region(game, h, i, op))
        for i in range(game.n)
    )


_STEP_RE = re.compile(r"^step:\s*(.*)$")
_CLAUSE_RE = re.compile(r"^player\s*=\s*(\d+)\s+remove\s*=\s*(.+)$")
_FINITE_SET_RE = re.compile(r"^\{(.*)\}$")


def parse_path_script(text: str, game: Game) -> list[dict[int, Factor]]:
    """Parse removal steps: `step: player=1 remove=[0,1/2) ; player=2 ...`."""
    steps: list[dict[int, Factor]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        row = raw.strip()
        if not row or row.startswith("#"):
            continue
        m = _STEP_RE.match(row)
        if m is None:
            raise PathScriptError(f"expected a step: line, got {row!r}", lineno)
        removals: dict[int, Factor] = {}
        body = m.group(1).strip()
        clauses = [c.strip() for c in body.split(";")] if body else []
        for clause in clauses:
            if not clause:
                continue
            cm = _CLAUSE_RE.match(clause)
            if cm is None:
                raise PathScriptError(f"bad clause {clause!r}", lineno)
            player = int(cm.group(1))
            if not 1 <= player <= game.n:
                raise PathScriptError(
                    f"no player {player} in this game", lineno
                )
            if player - 1 in removals:
                raise PathScriptError(
                    f"player {player} named twice in one step", lineno
                )
            settext = cm.group(2).strip()
            if game.is_finite:
                fs = _FINITE_SET_RE.match(settext)
                if fs is None:
                    raise PathScriptError(
                        f"expected {{label,...}} removal, got {settext!r}",
                        lineno,
                    )
                inner = fs.group(1).strip()
                labels = (
                    frozenset(s.strip() for s in inner.split(","))
                    if inner
                    else frozenset()
                )
                unknown = labels - set(game.labels(player - 1))
                if unknown:
                    raise PathScriptError(
                        f"unknown strategy {sorted(unknown)[0]!r} "
                        f"for player {player}",
                        lineno,
                    )
                removals[player - 1] = labels
            else:
                try:
                    removals[player - 1] = parse_interval_set(settext)
                except IntervalSetParseError as e:
                    raise PathScriptError(str(e), lineno) from None
        steps.append(removals)
    if not steps:
        raise PathScriptError("script contains no steps", 1)
    return steps
