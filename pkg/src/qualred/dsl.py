"""Line-oriented text format for games, with parse and serialize.

    game "fx1"
    space 1 = interval [0,1]
    pref 1 piecewise:
      when x1 in [0,1): (x1, 1]
      when x1 in {1}: empty

Finite players use `finite {a, b}` spaces and `table:` blocks with one
`at` row per profile. `util N table:` rows carry rational payoffs; a game
declaring utilities and no pref blocks gets its preferences derived from
them. Blank lines and `#` comments are ignored.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .games import (
    Cell,
    Const,
    ContinuumSpace,
    Coord,
    EMPTY_VALUE,
    FiniteSpace,
    FiniteTable,
    Game,
    GameError,
    Piece,
    PiecewiseMap,
    SymInterval,
    UtilityTable,
    derive_pref_from_utility,
    validate_finite_table,
    validate_piecewise,
)
from .intervals import IntervalSet, IntervalSetParseError, parse_interval_set


class GameParseError(GameError):
    def __init__(self, message: str, line: int, col: int = 1, kind: str = "syntax"):
        super().__init__(f"line {line}, col {col}: {message}", kind=kind)
        self.line = line
        self.col = col


_GAME_RE = re.compile(r'^game\s+"([^"]*)"\s*$')
_SPACE_RE = re.compile(r"^space\s+(\d+)\s*=\s*(finite|interval)\s+(.*)$")
_FINITE_BODY_RE = re.compile(r"^\{(.*)\}$")
_DECL_RE = re.compile(r"^(pref|comp|util)\s+(\d+)\s+(piecewise|table):\s*$")
_WHEN_RE = re.compile(r"^when\s+(.*?)\s*:\s*(.*)$")
_AT_TABLE_RE = re.compile(r"^at\s+(.*?)\s*:\s*\{(.*)\}\s*$")
_AT_UTIL_RE = re.compile(r"^at\s+(.*?)\s*=\s*(-?\d+(?:/\d+)?)\s*$")
_COND_ATOM_RE = re.compile(r"^x(\d+)\s+in\s+(.+)$")
_EXPR = r"(?:x\d+|-?\d+(?:/\d+)?)"
_VALUE_RE = re.compile(rf"^([\[\(])\s*({_EXPR})\s*,\s*({_EXPR})\s*([\]\)])$")
_LABEL_RE = re.compile(r"^[A-Za-z0-9_./+-]+$")


def _parse_expr(text: str, n: int, line: int):
    if text.startswith("x"):
        player = int(text[1:])
        if not 1 <= player <= n:
            raise GameParseError(
                f"value references player {player}, game has {n}",
                line,
                kind="unknown-player",
            )
        return Coord(player)
    return Const(Fraction(text))


def _parse_value(text: str, n: int, line: int):
    if text == "empty":
        return EMPTY_VALUE
    m = _VALUE_RE.match(text)
    if m is None:
        raise GameParseError(f"bad value {text!r}", line)
    return SymInterval(
        _parse_expr(m.group(2), n, line),
        m.group(1) == "[",
        _parse_expr(m.group(3), n, line),
        m.group(4) == "]",
    )


def _parse_cond(text: str, n: int, line: int) -> dict[int, IntervalSet]:
    out: dict[int, IntervalSet] = {}
    for atom in text.split(" and "):
        m = _COND_ATOM_RE.match(atom.strip())
        if m is None:
            raise GameParseError(f"bad condition {atom.strip()!r}", line)
        player = int(m.group(1))
        if not 1 <= player <= n:
            raise GameParseError(
                f"condition references player {player}, game has {n}",
                line,
                kind="unknown-player",
            )
        try:
            part = parse_interval_set(m.group(2))
        except IntervalSetParseError as e:
            raise GameParseError(str(e), line, col=atom.find("in") + 1) from None
        # repeated atoms for one player intersect
        out[player] = part if player not in out else out[player].intersect(part)
    return out


def _parse_profile(text: str, spaces, line: int) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(","))
    if len(parts) != len(spaces):
        raise GameParseError(
            f"profile {text!r} has {len(parts)} coordinates, "
            f"game has {len(spaces)} players",
            line,
        )
    for k, label in enumerate(parts):
        if label not in spaces[k].labels:
            raise GameParseError(
                f"unknown strategy {label!r} for player {k + 1}", line
            )
    return parts


class _Lines:
    def __init__(self, text: str):
        self.rows = text.splitlines()
        self.pos = 0

    def peek(self):
        while self.pos < len(self.rows):
            raw = self.rows[self.pos].strip()
            if raw and not raw.startswith("#"):
                return self.pos + 1, raw
            self.pos += 1
        return None

    def take(self):
        item = self.peek()
        if item is not None:
            self.pos += 1
        return item


def parse_game(text: str) -> Game:
    lines = _Lines(text)
    first = lines.take()
    if first is None or _GAME_RE.match(first[1]) is None:
        lineno = 1 if first is None else first[0]
        raise GameParseError('expected game "<name>" header', lineno)
    name = _GAME_RE.match(first[1]).group(1)

    spaces: dict[int, object] = {}
    decls: list[tuple[str, int, str, int, list[tuple[int, str]]]] = []
    while True:
        item = lines.take()
        if item is None:
            break
        lineno, row = item
        m = _SPACE_RE.match(row)
        if m is not None:
            idx = int(m.group(1))
            if idx in spaces:
                raise GameParseError(f"player {idx} declared twice", lineno)
            if m.group(2) == "finite":
                body = _FINITE_BODY_RE.match(m.group(3).strip())
                if body is None:
                    raise GameParseError("expected finite {a, b, ...}", lineno)
                labels = tuple(s.strip() for s in body.group(1).split(","))
                if any(not _LABEL_RE.match(s) for s in labels):
                    raise GameParseError("bad strategy label", lineno)
                if len(set(labels)) != len(labels):
                    raise GameParseError("duplicate strategy label", lineno)
                spaces[idx] = FiniteSpace(labels)
            else:
                try:
                    carrier = parse_interval_set(m.group(3))
                except IntervalSetParseError as e:
                    raise GameParseError(str(e), lineno, col=row.find("=") + 2) from None
                if carrier.is_empty:
                    raise GameParseError("carrier must be nonempty", lineno)
                spaces[idx] = ContinuumSpace(carrier)
            continue
        m = _DECL_RE.match(row)
        if m is None:
            raise GameParseError(f"unrecognized declaration {row!r}", lineno)
        rows: list[tuple[int, str]] = []
        while True:
            nxt = lines.peek()
            if nxt is None:
                break
            if not (nxt[1].startswith("when ") or nxt[1].startswith("at ")):
                break
            rows.append(lines.take())
        if not rows:
            raise GameParseError("declaration block has no rows", lineno)
        decls.append((m.group(1), int(m.group(2)), m.group(3), lineno, rows))

    if not spaces:
        raise GameParseError("game declares no strategy spaces", first[0])
    n = max(spaces)
    if sorted(spaces) != list(range(1, n + 1)):
        missing = next(k for k in range(1, n + 1) if k not in spaces)
        raise GameParseError(
            f"player {missing} has no space declaration",
            first[0],
            kind="unknown-player",
        )
    ordered = tuple(spaces[k] for k in range(1, n + 1))
    kinds = {isinstance(s, FiniteSpace) for s in ordered}
    if len(kinds) == 2:
        raise GameParseError("finite and interval spaces cannot mix", first[0])
    finite = kinds.pop()

    game = Game(name=name, spaces=ordered, prefs=())
    prefs: dict[int, object] = {}
    comps: dict[int, object] = {}
    utils: dict[int, UtilityTable] = {}
    for decl, player, shape, lineno, rows in decls:
        if not 1 <= player <= n:
            raise GameParseError(
                f"{decl} names player {player}, game has {n}",
                lineno,
                kind="unknown-player",
            )
        target = {"pref": prefs, "comp": comps, "util": utils}[decl]
        if player in target:
            raise GameParseError(
                f"{decl} {player} declared twice", lineno, kind="overlap"
            )
        if decl == "util":
            if shape != "table" or not finite:
                raise GameParseError(
                    "utilities need a table over finite spaces", lineno
                )
            table: dict = {}
            for rline, rtext in rows:
                m = _AT_UTIL_RE.match(rtext)
                if m is None:
                    raise GameParseError(f"bad utility row {rtext!r}", rline)
                profile = _parse_profile(m.group(1), ordered, rline)
                if profile in table:
                    raise GameParseError(
                        f"duplicate row for {m.group(1)}", rline, kind="overlap"
                    )
                table[profile] = Fraction(m.group(2))
            for x in itertools.product(*(s.labels for s in ordered)):
                if x not in table:
                    raise GameParseError(
                        f"util {player} has no row for {','.join(x)}",
                        lineno,
                        kind="uncovered",
                    )
            utils[player] = UtilityTable(player, table)
            continue
        if finite:
            if shape != "table":
                raise GameParseError(
                    "finite spaces take table: blocks", lineno
                )
            table = {}
            for rline, rtext in rows:
                m = _AT_TABLE_RE.match(rtext)
                if m is None:
                    raise GameParseError(f"bad table row {rtext!r}", rline)
                profile = _parse_profile(m.group(1), ordered, rline)
                if profile in table:
                    raise GameParseError(
                        f"duplicate row for {m.group(1)}", rline, kind="overlap"
                    )
                body = m.group(2).strip()
                if body:
                    sep = "," if "," in body else None
                    labels = [s.strip() for s in body.split(sep)]
                else:
                    labels = []
                table[profile] = frozenset(labels)
            corr = FiniteTable(player, table)
            try:
                validate_finite_table(game, corr)
            except GameError as e:
                raise GameParseError(str(e), lineno, kind=e.kind) from None
        else:
            if shape != "piecewise":
                raise GameParseError(
                    "interval spaces take piecewise: blocks", lineno
                )
            pieces = []
            for rline, rtext in rows:
                m = _WHEN_RE.match(rtext)
                if m is None:
                    raise GameParseError(f"bad piece row {rtext!r}", rline)
                cond = _parse_cond(m.group(1), n, rline)
                value = _parse_value(m.group(2).strip(), n, rline)
                factors = tuple(
                    cond[k + 1].intersect(ordered[k].carrier)
                    if k + 1 in cond
                    else ordered[k].carrier
                    for k in range(n)
                )
                pieces.append(Piece(Cell(factors), value))
            corr = PiecewiseMap(player, tuple(pieces))
            try:
                validate_piecewise(game, corr)
            except GameError as e:
                raise GameParseError(str(e), lineno, kind=e.kind) from None
        target[player] = corr

    def complete(group: dict, what: str):
        if not group:
            return None
        for k in range(1, n + 1):
            if k not in group:
                raise GameParseError(
                    f"{what} declared for some players but not player {k}",
                    first[0],
                )
        return tuple(group[k] for k in range(1, n + 1))

    pref_tuple = complete(prefs, "pref")
    comp_tuple = complete(comps, "comp")
    util_tuple = complete(utils, "util")
    if pref_tuple is None:
        if util_tuple is None:
            raise GameParseError(
                "game needs pref blocks or full utility tables", first[0]
            )
        game = Game(
            name=name, spaces=ordered, prefs=(), comps=comp_tuple,
            utils=util_tuple,
        )
        return derive_pref_from_utility(game)
    return Game(
        name=name, spaces=ordered, prefs=pref_tuple, comps=comp_tuple,
        utils=util_tuple,
    )


def _render_expr(expr) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    return f"x{expr.player}"


def _render_value(value) -> str:
    if value is EMPTY_VALUE or isinstance(value, type(EMPTY_VALUE)):
        return "empty"
    bra = "[" if value.lo_closed else "("
    ket = "]" if value.hi_closed else ")"
    return f"{bra}{_render_expr(value.lo)}, {_render_expr(value.hi)}{ket}"


def serialize_game(game: Game) -> str:
    """Canonical text for a game; parse(serialize(g)) rebuilds g."""
    out = [f'game "{game.name}"']
    for k, space in enumerate(game.spaces):
        if isinstance(space, FiniteSpace):
            out.append(f"space {k + 1} = finite {{{', '.join(space.labels)}}}")
        else:
            out.append(f"space {k + 1} = interval {space.carrier.render()}")

    def emit_corr(kw: str, corr) -> None:
        if isinstance(corr, FiniteTable):
            out.append(f"{kw} {corr.player} table:")
            order = {s: j for j, s in enumerate(game.labels(corr.player - 1))}
            for x in game.profiles():
                labels = sorted(corr.table[x], key=order.__getitem__)
                out.append(f"  at {','.join(x)}: {{{', '.join(labels)}}}")
        else:
            if corr.clip is not None:
                raise GameError("restricted games are not serializable")
            out.append(f"{kw} {corr.player} piecewise:")
            for piece in corr.pieces:
                atoms = [
                    f"x{j + 1} in {f.render()}"
                    for j, f in enumerate(piece.cell.factors)
                    if f != game.carrier(j)
                ]
                if not atoms:
                    atoms = [f"x1 in {game.carrier(0).render()}"]
                cond = " and ".join(atoms)
                out.append(f"  when {cond}: {_render_value(piece.value)}")

    if game.prefs_derived:
        assert game.utils is not None
    else:
        for corr in game.prefs:
            emit_corr("pref", corr)
    if game.comps is not None:
        for corr in game.comps:
            emit_corr("comp", corr)
    if game.utils is not None:
        for u in game.utils:
            out.append(f"util {u.player} table:")
            for x in game.profiles():
                out.append(f"  at {','.join(x)} = {u.table[x]}")
    return "\n".join(out) + "\n"
