"""Checkers: structural hypotheses, elimination safety conditions,
maximal elements, and preservation of maximal elements under reduction.

Continuum checks run on a finite candidate grid: every constant appearing
in carriers, cells, or values splits the axes into segments, and each
check's verdict is constant on products of segments, so probing every
breakpoint and enough interior points per segment decides the whole
space. A seeded batch of random profiles is probed on top as a
belt-and-braces measure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .games import (
    Box,
    Const,
    Coord,
    EmptyValue,
    Game,
    GameError,
    PiecewiseMap,
    box_intersect,
    box_is_empty,
    box_pick_point,
    boxes_subtract,
    eval_value,
)
from .intervals import IntervalSet
from .engine import (
    Factor,
    Pairing,
    _region_where,
    dominator_set,
    factor_is_empty,
    restrict,
)

SPOT_CHECKS = 1000
_SPOT_SEED = 20240


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(_fmt(v) for v in value) + ")"
    if isinstance(value, IntervalSet):
        return value.render()
    return str(value)


@dataclass
class Verdict:
    name: str
    status: str  # "holds" | "fails" | "not-checkable"
    witness: tuple | None = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "holds"

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = [_fmt(w) for w in self.witness]
        if self.note:
            out["note"] = self.note
        return out


def _global_breakpoints(game: Game) -> list[Fraction]:
    values: set[Fraction] = set()

    def add_set(s: IntervalSet) -> None:
        for part in s.parts:
            values.add(part.lo.value)
            values.add(part.hi.value)

    groups = [game.prefs]
    if game.comps is not None:
        groups.append(game.comps)
    for i in range(game.n):
        add_set(game.carrier(i))
    for group in groups:
        for corr in group:
            if corr.clip is not None:
                add_set(corr.clip)
            for piece in corr.pieces:
                for f in piece.cell.factors:
                    add_set(f)
                if isinstance(piece.value, EmptyValue):
                    continue
                for expr in (piece.value.lo, piece.value.hi):
                    if isinstance(expr, Const):
                        values.add(expr.value)
    return sorted(values)


def _axis_candidates(
    carrier: IntervalSet, points: list[Fraction], density: int
) -> list[Fraction]:
    """Breakpoints inside the carrier plus density interior samples per gap."""
    out = [p for p in points if carrier.contains(p)]
    for a, b in zip(points, points[1:]):
        if carrier.intersect(IntervalSet.interval(a, b, False, False)).is_empty:
            continue
        step = Fraction(b - a, density + 1)
        out.extend(a + step * k for k in range(1, density + 1))
    return sorted(set(out))


def _candidate_axes(game: Game, extra: list[Fraction] = ()) -> list[list[Fraction]]:
    points = sorted(set(_global_breakpoints(game)) | set(extra))
    density = game.n + 1
    return [
        _axis_candidates(game.carrier(i), points, density)
        for i in range(game.n)
    ]


def _random_member(rng: random.Random, s: IntervalSet) -> Fraction:
    part = rng.choice(s.parts)
    if part.is_degenerate():
        return part.lo.value
    span = part.hi.value - part.lo.value
    return part.lo.value + span * Fraction(rng.randint(1, 9999), 10000)


def _random_profiles(game: Game, rng: random.Random, count: int):
    carriers = [game.carrier(i) for i in range(game.n)]
    for _ in range(count):
        yield tuple(_random_member(rng, c) for c in carriers)


def _with_coord(profile, i: int, y):
    return profile[:i] + (y,) + profile[i + 1 :]


def _finite_profiles(game: Game):
    return list(game.profiles())


def check_property_T_single(game: Game) -> Verdict:
    """Preferred sets shrink along preference: y above x forces everything
    above y (closure included) to sit above x as well."""
    name = "propertyT-single"
    if game.is_finite:
        for i in range(game.n):
            for x in game.profiles():
                px = eval_value(game, game.prefs[i], x)
                for y in px:
                    py = eval_value(game, game.prefs[i], _with_coord(x, i, y))
                    if not py <= px:
                        return Verdict(name, "fails", witness=(i + 1, x, y))
        return Verdict(name, "holds")
    axes = _candidate_axes(game)

    def probe(i: int, x, y) -> tuple | None:
        px = eval_value(game, game.prefs[i], x)
        if not px.contains(y):
            return None
        py = eval_value(game, game.prefs[i], _with_coord(x, i, y))
        if not py.closure().is_subset(px):
            return (i + 1, x, y)
        return None

    for i in range(game.n):
        for x in itertools.product(*axes):
            for y in axes[i]:
                bad = probe(i, x, y)
                if bad is not None:
                    return Verdict(name, "fails", witness=bad)
    rng = random.Random(_SPOT_SEED)
    for x in _random_profiles(game, rng, SPOT_CHECKS):
        i = rng.randrange(game.n)
        y = _random_member(rng, game.carrier(i))
        bad = probe(i, x, y)
        if bad is not None:
            return Verdict(name, "fails", witness=bad)
    return Verdict(name, "holds")


def check_property_T_pair(game: Game) -> Verdict:
    """The comparison map must extend preference and collapse into it one
    step up: y above x makes everything comparable to y sit above x."""
    name = "propertyT-pair"
    if game.comps is None:
        return Verdict(name, "not-checkable", note="game has no comparison map")
    if game.is_finite:
        for i in range(game.n):
            for x in game.profiles():
                px = eval_value(game, game.prefs[i], x)
                qx = eval_value(game, game.comps[i], x)
                if not px <= qx:
                    return Verdict(name, "fails", witness=(i + 1, x, "P-not-in-Q"))
                for y in px:
                    qy = eval_value(game, game.comps[i], _with_coord(x, i, y))
                    if not qy <= px:
                        return Verdict(name, "fails", witness=(i + 1, x, y))
        return Verdict(name, "holds")
    axes = _candidate_axes(game)

    def probe(i: int, x, y=None) -> tuple | None:
        px = eval_value(game, game.prefs[i], x)
        qx = eval_value(game, game.comps[i], x)
        if not px.is_subset(qx):
            return (i + 1, x, "P-not-in-Q")
        if y is not None and px.contains(y):
            qy = eval_value(game, game.comps[i], _with_coord(x, i, y))
            if not qy.is_subset(px):
                return (i + 1, x, y)
        return None

    for i in range(game.n):
        for x in itertools.product(*axes):
            bad = probe(i, x)
            if bad is not None:
                return Verdict(name, "fails", witness=bad)
            for y in axes[i]:
                bad = probe(i, x, y)
                if bad is not None:
                    return Verdict(name, "fails", witness=bad)
    rng = random.Random(_SPOT_SEED + 1)
    for x in _random_profiles(game, rng, SPOT_CHECKS):
        i = rng.randrange(game.n)
        y = _random_member(rng, game.carrier(i))
        bad = probe(i, x, y)
        if bad is not None:
            return Verdict(name, "fails", witness=bad)
    return Verdict(name, "holds")


def _check_pointwise(game: Game, name: str, pred) -> Verdict:
    """Run a per-profile predicate over grid and spot-check profiles.

    pred(i, x) returns None or a witness tuple.
    """
    if game.is_finite:
        for i in range(game.n):
            for x in game.profiles():
                bad = pred(i, x)
                if bad is not None:
                    return Verdict(name, "fails", witness=bad)
        return Verdict(name, "holds")
    axes = _candidate_axes(game)
    for i in range(game.n):
        for x in itertools.product(*axes):
            bad = pred(i, x)
            if bad is not None:
                return Verdict(name, "fails", witness=bad)
    rng = random.Random(_SPOT_SEED + sum(name.encode()))
    for x in _random_profiles(game, rng, SPOT_CHECKS):
        for i in range(game.n):
            bad = pred(i, x)
            if bad is not None:
                return Verdict(name, "fails", witness=bad)
    return Verdict(name, "holds")


def check_irreflexive(game: Game) -> Verdict:
    def pred(i, x):
        v = eval_value(game, game.prefs[i], x)
        own = x[i]
        hit = v.contains(own) if isinstance(v, IntervalSet) else own in v
        return (i + 1, x) if hit else None

    return _check_pointwise(game, "irreflexive", pred)


def check_strong_irreflexive(game: Game) -> Verdict:
    """No strategy sits in the closure of what it is beaten by."""

    def pred(i, x):
        v = eval_value(game, game.prefs[i], x)
        own = x[i]
        if isinstance(v, IntervalSet):
            hit = v.closure().contains(own)
        else:
            hit = own in v
        return (i + 1, x) if hit else None

    return _check_pointwise(game, "strong-irreflexive", pred)


def check_q_reflexive(game: Game) -> Verdict:
    name = "q-reflexive"
    if game.comps is None:
        return Verdict(name, "not-checkable", note="game has no comparison map")

    def pred(i, x):
        v = eval_value(game, game.comps[i], x)
        own = x[i]
        hit = v.contains(own) if isinstance(v, IntervalSet) else own in v
        return None if hit else (i + 1, x)

    return _check_pointwise(game, name, pred)


def check_q_closed_convex(game: Game) -> Verdict:
    name = "q-closed-convex"
    if game.comps is None:
        return Verdict(name, "not-checkable", note="game has no comparison map")
    if game.is_finite:
        # label order stands in for the line: values must be contiguous runs
        def pred(i, x):
            v = eval_value(game, game.comps[i], x)
            if not v:
                return None
            order = {s: k for k, s in enumerate(game.labels(i))}
            idx = sorted(order[s] for s in v)
            if idx[-1] - idx[0] + 1 != len(idx):
                return (i + 1, x)
            return None

        return _check_pointwise(game, name, pred)

    def pred(i, x):
        v = eval_value(game, game.comps[i], x)
        if v.is_empty:
            return None
        if len(v.parts) > 1 or v.closure() != v:
            return (i + 1, x)
        return None

    return _check_pointwise(game, name, pred)


def _half_line(pivot: Fraction, closed: bool, upper: bool, hull: IntervalSet) -> IntervalSet:
    lo_v, _ = hull.inf()
    hi_v, _ = hull.sup()
    if upper:
        s = IntervalSet.interval(pivot, max(hi_v, pivot), closed, True)
    else:
        s = IntervalSet.interval(min(lo_v, pivot), pivot, True, closed)
    return s.intersect(hull)


def check_open_lower_sections(game: Game) -> Verdict:
    """Each set of profiles ranking a fixed strategy above the current one
    must be open in the product (relative to the carriers)."""
    name = "open-lower-sections"
    if game.is_finite:
        return Verdict(name, "holds", note="finite spaces are discrete")
    base_points = _global_breakpoints(game)
    carriers = [game.carrier(j) for j in range(game.n)]

    def member(i: int, y: Fraction, x) -> bool:
        return eval_value(game, game.prefs[i], x).contains(y)

    for i in range(game.n):
        y_axis = _axis_candidates(carriers[i], base_points, game.n + 1)
        for y in y_axis:
            points = sorted(set(base_points) | {y})
            axes = []
            probe_opts: list[dict[Fraction, list[Fraction]]] = []
            for j in range(game.n):
                cands = _axis_candidates(carriers[j], points, 1)
                axes.append(cands)
                opts: dict[Fraction, list[Fraction]] = {}
                for c in cands:
                    if c not in points:
                        opts[c] = [c]  # interior of its segment
                        continue
                    k = points.index(c)
                    near = [c]
                    if k > 0:
                        near.append(c - Fraction(c - points[k - 1], 2))
                    if k + 1 < len(points):
                        near.append(c + Fraction(points[k + 1] - c, 2))
                    opts[c] = [p for p in near if carriers[j].contains(p)]
                probe_opts.append(opts)
            for x in itertools.product(*axes):
                if not member(i, y, x):
                    continue
                for probe in itertools.product(
                    *(probe_opts[j][x[j]] for j in range(game.n))
                ):
                    if not member(i, y, probe):
                        return Verdict(name, "fails", witness=(i + 1, y, x))
    return Verdict(name, "holds")


def check_z_star(game: Game) -> Verdict:
    """Existence, at every profile, of an own strategy comparable to all
    own replacements at once."""
    name = "z-star"
    if not game.is_finite:
        return Verdict(
            name, "not-checkable", note="needs finite spaces"
        )
    if game.comps is None:
        return Verdict(name, "not-checkable", note="game has no comparison map")
    for x in game.profiles():
        for i in range(game.n):
            common = None
            for z in game.labels(i):
                v = eval_value(game, game.comps[i], _with_coord(x, i, z))
                common = v if common is None else common & v
                if not common:
                    return Verdict(name, "fails", witness=(i + 1, x))
    return Verdict(name, "holds")


HYPOTHESIS_CHECKS = {
    "irreflexive": check_irreflexive,
    "strong-irreflexive": check_strong_irreflexive,
    "propertyT-single": check_property_T_single,
    "propertyT-pair": check_property_T_pair,
    "q-reflexive": check_q_reflexive,
    "q-closed-convex": check_q_closed_convex,
    "open-lower-sections": check_open_lower_sections,
    "z-star": check_z_star,
}


def check_hypotheses(game: Game, names: list[str] | None = None) -> dict[str, Verdict]:
    if names is None:
        names = list(HYPOTHESIS_CHECKS)
    out = {}
    for name in names:
        if name not in HYPOTHESIS_CHECKS:
            raise GameError(f"unknown hypothesis {name!r}")
        out[name] = HYPOTHESIS_CHECKS[name](game)
    return out


def _full_domain(game: Game, i: int) -> Factor:
    if game.is_finite:
        return frozenset(game.labels(i))
    return game.carrier(i)


def _factor_pick(game: Game, i: int, f: Factor):
    if isinstance(f, IntervalSet):
        return f.pick()
    order = {s: k for k, s in enumerate(game.labels(i))}
    return min(f, key=order.__getitem__)


def _factor_minus(a: Factor, b: Factor) -> Factor:
    if isinstance(a, IntervalSet):
        return a.difference(b)
    return a - b


def check_condition_D(game: Game, h: Pairing) -> Verdict:
    """Everything dominated at h has a dominator still alive in h."""
    name = "condition-D"
    for i in range(game.n):
        if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
            continue
        domain = _full_domain(game, i)
        dominated = _region_where(game, h, i, domain=domain)
        good = _region_where(game, h, i, domain=dominated, member=h[i])
        bad = _factor_minus(dominated, good)
        if not factor_is_empty(bad):
            return Verdict(name, "fails", witness=(i + 1, _factor_pick(game, i, bad)))
    return Verdict(name, "holds")


def check_condition_C(game: Game, h: Pairing) -> Verdict:
    """Everything dominated at h has a dominator that is itself
    undominated at h."""
    name = "condition-C"
    for i in range(game.n):
        if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
            continue
        domain = _full_domain(game, i)
        dominated = _region_where(game, h, i, domain=domain)
        undominated = _factor_minus(domain, dominated)
        good = _region_where(game, h, i, domain=dominated, member=undominated)
        bad = _factor_minus(dominated, good)
        if not factor_is_empty(bad):
            return Verdict(name, "fails", witness=(i + 1, _factor_pick(game, i, bad)))
    return Verdict(name, "holds")


@dataclass
class DominatorSearch:
    strategy: object | None
    definitive: bool


def find_undominated_dominator(game: Game, h: Pairing, i: int, x) -> DominatorSearch:
    """A dominator of x at h that is itself undominated at h, drawn from
    the player's surviving set. A continuum miss is inconclusive."""
    if any(factor_is_empty(h[j]) for j in range(game.n) if j != i):
        raise GameError("precondition unmet: an opponent factor is empty")
    d = dominator_set(game, h, i, x).strategies
    if factor_is_empty(d):
        raise GameError("precondition unmet: the strategy is not dominated")
    if game.is_finite:
        for y in game.labels(i):
            if y in d and y in h[i]:
                if not dominator_set(game, h, i, y).strategies:
                    return DominatorSearch(y, True)
        return DominatorSearch(None, True)
    domain = game.carrier(i)
    dominated = _region_where(game, h, i, domain=domain)
    pool = d.intersect(h[i]).difference(dominated)
    if not pool.is_empty:
        return DominatorSearch(pool.pick(), True)
    return DominatorSearch(None, False)


@dataclass
class MaximalElements:
    kind: str  # "profiles" | "boxes"
    profiles: list[tuple] = field(default_factory=list)
    boxes: list[Box] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.profiles and not self.boxes


def _value_empty_boxes(game: Game, corr: PiecewiseMap, piece) -> list[Box]:
    """Boxes inside the piece's cell where the evaluated value is empty."""
    cell: Box = tuple(piece.cell.factors)
    if isinstance(piece.value, EmptyValue):
        return [cell]
    v = piece.value
    n = game.n
    hulls = [game.carrier(j) for j in range(n)]
    out: list[Box] = []

    def constrained(player: int, s: IntervalSet) -> Box:
        return tuple(
            cell[j].intersect(s) if j == player - 1 else cell[j]
            for j in range(n)
        )

    both_closed = v.lo_closed and v.hi_closed
    if isinstance(v.lo, Coord) and isinstance(v.hi, Coord):
        if v.lo.player != v.hi.player:
            raise GameError(
                "region extraction does not support values whose two "
                "endpoints track different players"
            )
        if not both_closed:
            out.append(cell)
    elif isinstance(v.lo, Coord):
        c = v.hi.value
        box = constrained(
            v.lo.player,
            _half_line(c, not both_closed, True, hulls[v.lo.player - 1]),
        )
        if not box_is_empty(box):
            out.append(box)
    elif isinstance(v.hi, Coord):
        c = v.lo.value
        box = constrained(
            v.hi.player,
            _half_line(c, not both_closed, False, hulls[v.hi.player - 1]),
        )
        if not box_is_empty(box):
            out.append(box)
    else:
        if IntervalSet.interval(v.lo.value, v.hi.value, v.lo_closed, v.hi_closed).is_empty:
            out.append(cell)

    if corr.clip is not None:
        # the clipped value empties when the raw interval misses every part
        options_per_part: list[list[tuple[int, IntervalSet] | None | str]] = []
        for part in corr.clip.parts:
            opts: list = []
            # raw upper end strictly left of the part
            a, alpha = part.lo.value, part.lo.closed
            strict = alpha and v.hi_closed
            if isinstance(v.hi, Coord):
                opts.append(
                    (
                        v.hi.player,
                        _half_line(a, not strict, False, hulls[v.hi.player - 1]),
                    )
                )
            elif (v.hi.value < a) or (v.hi.value == a and not strict):
                opts.append("always")
            # raw lower end strictly right of the part
            b, beta = part.hi.value, part.hi.closed
            strict = beta and v.lo_closed
            if isinstance(v.lo, Coord):
                opts.append(
                    (
                        v.lo.player,
                        _half_line(b, not strict, True, hulls[v.lo.player - 1]),
                    )
                )
            elif (v.lo.value > b) or (v.lo.value == b and not strict):
                opts.append("always")
            if not opts:
                opts = []  # this part is always hit: no clip-miss this way
            options_per_part.append(opts)
        if all(options_per_part):
            for combo in itertools.product(*options_per_part):
                box = cell
                dead = False
                for opt in combo:
                    if opt == "always":
                        continue
                    player, constraint = opt
                    box = tuple(
                        box[j].intersect(constraint) if j == player - 1 else box[j]
                        for j in range(n)
                    )
                    if box_is_empty(box):
                        dead = True
                        break
                if not dead:
                    out.append(box)
    return out


def _merge_boxes(boxes: list[Box]) -> list[Box]:
    current = [b for b in boxes if not box_is_empty(b)]
    changed = True
    while changed:
        changed = False
        for a in range(len(current)):
            for b in range(a + 1, len(current)):
                diff = [
                    k
                    for k in range(len(current[a]))
                    if current[a][k] != current[b][k]
                ]
                if len(diff) <= 1:
                    merged = list(current[a])
                    if diff:
                        k = diff[0]
                        merged[k] = current[a][k].union(current[b][k])
                    current = (
                        current[:a]
                        + [tuple(merged)]
                        + current[a + 1 : b]
                        + current[b + 1 :]
                    )
                    changed = True
                    break
            if changed:
                break
    return sorted(current, key=lambda box: [f.render() for f in box])


def maximal_elements(game: Game) -> MaximalElements:
    """Profiles at which nobody prefers any replacement: all P_i empty."""
    if game.is_finite:
        profiles = [
            x
            for x in game.profiles()
            if all(not eval_value(game, game.prefs[i], x) for i in range(game.n))
        ]
        return MaximalElements("profiles", profiles=profiles)
    regions = [[tuple(game.carrier(j) for j in range(game.n))]]
    for i in range(game.n):
        corr = game.prefs[i]
        empty_boxes: list[Box] = []
        for piece in corr.pieces:
            empty_boxes.extend(_value_empty_boxes(game, corr, piece))
        regions.append(empty_boxes)
    current = regions[0]
    for empty_boxes in regions[1:]:
        nxt = []
        for a in current:
            for b in empty_boxes:
                cut = box_intersect(a, b)
                if not box_is_empty(cut):
                    nxt.append(cut)
        current = nxt
    return MaximalElements("boxes", boxes=_merge_boxes(current))


@dataclass
class PreservationReport:
    equal: bool
    original: MaximalElements
    reduced: MaximalElements
    witness: tuple | None
    hypotheses: dict[str, Verdict]
    label: str | None

    def to_dict(self) -> dict:
        def side(m: MaximalElements) -> list:
            if m.kind == "profiles":
                return [list(x) for x in m.profiles]
            return [[f.render() for f in box] for box in m.boxes]

        out = {
            "equal": self.equal,
            "original_maximal": side(self.original),
            "reduced_maximal": side(self.reduced),
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
        }
        if self.witness is not None:
            out["witness"] = [str(w) for w in self.witness]
        if self.label is not None:
            out["label"] = self.label
        return out


def check_preservation(game: Game, final: Pairing) -> PreservationReport:
    """Compare maximal elements before reduction and inside the reduced
    game. Inequality is labeled an expected counterexample whenever one of
    the preservation hypotheses already fails (or cannot be checked)."""
    original = maximal_elements(game)
    reduced_game = restrict(game, final)
    reduced = maximal_elements(reduced_game)
    witness = None
    if game.is_finite:
        a, b = set(original.profiles), set(reduced.profiles)
        equal = a == b
        if not equal:
            sym = sorted(a ^ b)
            witness = sym[0]
    else:
        only_a = boxes_subtract(original.boxes, reduced.boxes)
        only_b = boxes_subtract(reduced.boxes, original.boxes)
        equal = not only_a and not only_b
        if not equal:
            pool = only_a if only_a else only_b
            witness = box_pick_point(pool[0])
    hypotheses = {
        "irreflexive": check_irreflexive(game),
        "propertyT-pair": check_property_T_pair(game),
        "z-star": check_z_star(game),
    }
    label = None
    if not equal:
        if all(v.status == "holds" for v in hypotheses.values()):
            label = "THEOREM-VIOLATION"
        else:
            label = "EXPECTED-COUNTEREXAMPLE"
    return PreservationReport(
        equal=equal,
        original=original,
        reduced=reduced,
        witness=witness,
        hypotheses=hypotheses,
        label=label,
    )
