"""Dominance machinery: dominator sets, elimination regions, restrictions.

A pairing assigns each player a subset of their strategy space (labels for
finite games, an interval set otherwise). The dominator set of a strategy
x for player i, taken at a pairing H, is the intersection over all
opponent profiles in H of the preferred sets P_i(x, .); its members beat x
against everything the opponents might still play.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Union

from .games import (
    Cell,
    Const,
    ContinuumSpace,
    Coord,
    EmptyValue,
    FiniteSpace,
    FiniteTable,
    Game,
    GameError,
    Piece,
    PiecewiseMap,
    UtilityTable,
    eval_value,
)
from .intervals import IntervalSet

Factor = Union[frozenset, IntervalSet]
Pairing = tuple[Factor, ...]


class Operator(Enum):
    """The three elimination conditions for a strategy x of player i at H.

    ARROW   dominator set over current opponents is nonempty
    DOUBLE  dominator set additionally meets the player's own current set
    TAIL    same condition as ARROW; the operators differ along scripted
            paths, where ARROW tests against the opponents before the step
            and TAIL against the opponents after it
    """

    ARROW = "arrow"
    DOUBLE = "double"
    TAIL = "tail"


def factor_is_empty(f: Factor) -> bool:
    return f.is_empty if isinstance(f, IntervalSet) else not f


def full_pairing(game: Game) -> Pairing:
    out = []
    for space in game.spaces:
        if isinstance(space, FiniteSpace):
            out.append(frozenset(space.labels))
        else:
            out.append(space.carrier)
    return tuple(out)


def pairing_is_subset(a: Pairing, b: Pairing) -> bool:
    for x, y in zip(a, b):
        if isinstance(x, IntervalSet):
            if not x.is_subset(y):
                return False
        elif not x <= y:
            return False
    return True


def render_factor(game: Game, i: int, f: Factor) -> str:
    if isinstance(f, IntervalSet):
        return f.render()
    ordered = [s for s in game.labels(i) if s in f]
    return "{%s}" % ",".join(ordered)


def render_pairing(game: Game, h: Pairing) -> dict[str, str]:
    return {str(i + 1): render_factor(game, i, h[i]) for i in range(game.n)}


@dataclass(frozen=True)
class DominatorSet:
    player: int
    base: object
    strategies: Factor


def _sym_bound(expr, closed: bool, x: Fraction, own: int, overlaps, low_side: bool):
    """One endpoint of a piece's contribution to the dominator set.

    Intersecting y > s over all s in a range S tightens the bound to
    sup S, closed exactly when the sup is not attained; with >= the bound
    closes regardless. Upper endpoints behave dually through inf S.
    """
    if isinstance(expr, Const):
        return expr.value, closed
    if expr.player == own:
        return x, closed
    rng = overlaps[expr.player - 1]
    if low_side:
        value, attained = rng.sup()
    else:
        value, attained = rng.inf()
    return value, closed or not attained


def dominator_set(game: Game, h: Pairing, i: int, x) -> DominatorSet:
    """Strategies of player i beating x against every opponent profile in h.

    An empty opponent factor makes the condition vacuous: the result is the
    full ambient space. Elimination operators guard against that case
    themselves and eliminate nothing.
    """
    corr = game.prefs[i]
    if isinstance(corr, FiniteTable):
        if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
            return DominatorSet(i + 1, x, frozenset(game.labels(i)))
        opp_axes = [
            [s for s in game.labels(j) if s in h[j]]
            for j in range(game.n)
            if j != i
        ]
        result = None
        for opp in itertools.product(*opp_axes):
            profile = opp[:i] + (x,) + opp[i:]
            v = eval_value(game, corr, profile)
            result = v if result is None else result & v
            if not result:
                break
        return DominatorSet(i + 1, x, frozenset(result))

    carrier = game.carrier(i)
    if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
        return DominatorSet(i + 1, x, carrier)
    result = carrier
    for piece in corr.pieces:
        if not piece.cell.factors[i].contains(x):
            continue
        overlaps = []
        dead = False
        for j in range(game.n):
            if j == i:
                overlaps.append(None)
                continue
            o = piece.cell.factors[j].intersect(h[j])
            if o.is_empty:
                dead = True
                break
            overlaps.append(o)
        if dead:
            continue
        if isinstance(piece.value, EmptyValue):
            result = IntervalSet.empty()
            break
        v = piece.value
        lo_val, lo_closed = _sym_bound(
            v.lo, v.lo_closed, x, i + 1, overlaps, low_side=True
        )
        hi_val, hi_closed = _sym_bound(
            v.hi, v.hi_closed, x, i + 1, overlaps, low_side=False
        )
        result = result.intersect(
            IntervalSet.interval(lo_val, hi_val, lo_closed, hi_closed)
        )
        if result.is_empty:
            break
    if corr.clip is not None:
        result = result.intersect(corr.clip)
    return DominatorSet(i + 1, x, result)


def dominates(game: Game, h: Pairing, i: int, y, x) -> bool:
    if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
        raise GameError("dominance needs nonempty opponent factors")
    d = dominator_set(game, h, i, x).strategies
    if isinstance(d, IntervalSet):
        return d.contains(y)
    return y in d


def _condition_holds(
    game: Game, h: Pairing, i: int, x, member, exclude_self: bool
) -> bool:
    d = dominator_set(game, h, i, x).strategies
    if member is not None:
        d = d.intersect(member) if isinstance(d, IntervalSet) else d & member
    if exclude_self:
        if isinstance(d, IntervalSet):
            d = d.difference(IntervalSet.point(x))
        else:
            d = d - {x}
    return not factor_is_empty(d)


def _breakpoints(game: Game, h: Pairing, i: int, extra: list[IntervalSet]) -> list[Fraction]:
    values: set[Fraction] = set()

    def add_set(s: IntervalSet) -> None:
        for part in s.parts:
            values.add(part.lo.value)
            values.add(part.hi.value)

    for s in extra:
        add_set(s)
    corr = game.prefs[i]
    if corr.clip is not None:
        add_set(corr.clip)
    for piece in corr.pieces:
        add_set(piece.cell.factors[i])
        overlaps = {}
        dead = False
        for j in range(game.n):
            if j == i:
                continue
            o = piece.cell.factors[j].intersect(h[j])
            if o.is_empty:
                dead = True
                break
            overlaps[j] = o
        if dead or isinstance(piece.value, EmptyValue):
            continue
        for expr in (piece.value.lo, piece.value.hi):
            if isinstance(expr, Const):
                values.add(expr.value)
            elif expr.player != i + 1:
                o = overlaps[expr.player - 1]
                values.add(o.sup()[0])
                values.add(o.inf()[0])
    return sorted(values)


def _region_where(
    game: Game,
    h: Pairing,
    i: int,
    domain: Factor,
    member: Factor | None = None,
    exclude_self: bool = False,
) -> Factor:
    """Subset of domain where the dominance condition holds at pairing h.

    The condition: dominator set of x over the opponents in h, optionally
    intersected with member (minus x itself when exclude_self), nonempty.
    An empty opponent factor yields the empty region.
    """
    if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
        return frozenset() if isinstance(domain, frozenset) else IntervalSet.empty()
    if isinstance(domain, frozenset):
        return frozenset(
            x
            for x in domain
            if _condition_holds(game, h, i, x, member, exclude_self)
        )
    # The condition is piecewise constant between breakpoints: every
    # comparison pits x against a fixed rational, so one representative
    # per elementary piece decides the whole piece.
    extra = [domain]
    if member is not None:
        extra.append(member)
    points = _breakpoints(game, h, i, extra)
    included: list[IntervalSet] = []
    for k, b in enumerate(points):
        single = domain.intersect(IntervalSet.point(b))
        if not single.is_empty and _condition_holds(
            game, h, i, b, member, exclude_self
        ):
            included.append(single)
        if k + 1 < len(points):
            seg = domain.intersect(
                IntervalSet.interval(b, points[k + 1], False, False)
            )
            if not seg.is_empty:
                rep = (b + points[k + 1]) / 2
                if _condition_holds(game, h, i, rep, member, exclude_self):
                    included.append(seg)
    out = IntervalSet.empty()
    for part in included:
        out = out.union(part)
    return out


def eliminated_region(game: Game, h: Pairing, i: int, op: Operator) -> Factor:
    """Strategies of player i in h that the operator removes in one pass."""
    member = h[i] if op is Operator.DOUBLE else None
    return _region_where(game, h, i, domain=h[i], member=member)


def restrict(game: Game, h: Pairing) -> Game:
    """The game induced on the strategy sets of h.

    Values are cut down to the surviving sets; finite tables are rebuilt,
    continuum maps keep their pieces and gain a clip.
    """
    if game.is_finite:
        spaces = tuple(
            FiniteSpace(tuple(s for s in game.labels(i) if s in h[i]))
            for i in range(game.n)
        )
        kept = list(itertools.product(*(s.labels for s in spaces)))

        def cut(corr: FiniteTable, i: int) -> FiniteTable:
            return FiniteTable(
                corr.player,
                {x: corr.table[x] & h[i] for x in kept},
            )

        prefs = tuple(cut(c, i) for i, c in enumerate(game.prefs))
        comps = (
            tuple(cut(c, i) for i, c in enumerate(game.comps))
            if game.comps is not None
            else None
        )
        utils = (
            tuple(
                UtilityTable(u.player, {x: u.table[x] for x in kept})
                for u in game.utils
            )
            if game.utils is not None
            else None
        )
        return replace(
            game, spaces=spaces, prefs=prefs, comps=comps, utils=utils
        )

    spaces = tuple(ContinuumSpace(h[i]) for i in range(game.n))

    def cut_piecewise(corr: PiecewiseMap, i: int) -> PiecewiseMap:
        pieces = []
        for piece in corr.pieces:
            factors = tuple(
                f.intersect(h[j]) for j, f in enumerate(piece.cell.factors)
            )
            if any(f.is_empty for f in factors):
                continue
            pieces.append(Piece(Cell(factors), piece.value))
        clip = h[i] if corr.clip is None else corr.clip.intersect(h[i])
        return PiecewiseMap(corr.player, tuple(pieces), clip=clip)

    prefs = tuple(cut_piecewise(c, i) for i, c in enumerate(game.prefs))
    comps = (
        tuple(cut_piecewise(c, i) for i, c in enumerate(game.comps))
        if game.comps is not None
        else None
    )
    return replace(game, spaces=spaces, prefs=prefs, comps=comps)
