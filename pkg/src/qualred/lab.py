"""Random finite games, grid discretization, a brute-force reduction
oracle, and a seeded fuzzer for the reduction laws.

The fuzzer treats a law violation as a finding to report (with a greedy
shrink of the witness game), never as a crash: part of the point is
mapping where each law actually holds.
"""

from __future__ import annotations

import bisect
import csv
import io
import itertools
import json
import random
import string
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .analysis import (
    check_condition_C,
    check_condition_D,
    check_hypotheses,
    check_preservation,
)
from .dsl import serialize_game
from .engine import (
    Operator,
    Pairing,
    eliminated_region,
    factor_is_empty,
    full_pairing,
    render_pairing,
    restrict,
)
from .games import (
    FiniteSpace,
    FiniteTable,
    Game,
    GameError,
    UtilityTable,
    derive_pref_from_utility,
    eval_value,
)
from .reduction import InvalidRemoval, ReductionTrace, path_step, star_reduce

MODE_UTILITY = "utility"
MODE_RAW = "raw"


class BoundExceeded(GameError):
    def __init__(self, message: str, size: int, bound: int):
        super().__init__(message)
        self.size = size
        self.bound = bound


@dataclass(frozen=True)
class GeneratorConfig:
    players: int = 2
    sizes: tuple[int, ...] = (3, 3)
    seed: int = 0
    mode: str = MODE_UTILITY
    irreflexive: bool = False
    property_t_pair: bool = False
    with_q_reflexive: bool = False
    payoff_lo: int = 0
    payoff_hi: int = 2
    retries: int = 200


def _letters(sizes: tuple[int, ...]) -> list[tuple[str, ...]]:
    total = sum(sizes)
    if total <= len(string.ascii_lowercase):
        pool = string.ascii_lowercase
    else:
        pool = [f"s{k}" for k in range(total)]
    out = []
    at = 0
    for size in sizes:
        out.append(tuple(pool[at : at + size]))
        at += size
    return out


def _attach_comps(game: Game, config: GeneratorConfig) -> Game:
    """Comparison maps per the requested flags.

    reflexive only: the full own set everywhere. pair flag only: Q = P.
    Both: Q = P plus the diagonal, which stays inside P one step up.
    """
    if not (config.with_q_reflexive or config.property_t_pair):
        return game
    comps = []
    for i in range(game.n):
        own = frozenset(game.labels(i))
        table = {}
        for x in game.profiles():
            if config.property_t_pair:
                base = eval_value(game, game.prefs[i], x)
                if config.with_q_reflexive:
                    base = base | {x[i]}
            else:
                base = own
            table[x] = frozenset(base)
        comps.append(FiniteTable(i + 1, table))
    return replace(game, comps=tuple(comps))


def _requested_checks(config: GeneratorConfig) -> list[str]:
    names = []
    if config.irreflexive:
        names.append("irreflexive")
    if config.property_t_pair:
        names.append("propertyT-pair")
    if config.with_q_reflexive:
        names.append("q-reflexive")
    return names


def generate_game(config: GeneratorConfig) -> Game:
    """Deterministic in the seed; requested constraints are re-verified
    with the analysis checkers, regenerating up to the retry bound."""
    if config.players != len(config.sizes):
        raise GameError("sizes must list one entry per player")
    if any(s < 1 for s in config.sizes):
        raise GameError("sizes must be at least 1")
    if config.mode not in (MODE_UTILITY, MODE_RAW):
        raise GameError(f"unknown generator mode {config.mode!r}")
    rng = random.Random(config.seed)
    label_sets = _letters(config.sizes)
    spaces = tuple(FiniteSpace(ls) for ls in label_sets)
    size_tag = "x".join(str(s) for s in config.sizes)
    name = f"gen-{config.mode}-{size_tag}-{config.seed}"
    checks = _requested_checks(config)
    for _ in range(config.retries):
        if config.mode == MODE_UTILITY:
            utils = []
            for i in range(config.players):
                table = {
                    x: Fraction(rng.randint(config.payoff_lo, config.payoff_hi))
                    for x in itertools.product(*label_sets)
                }
                utils.append(UtilityTable(i + 1, table))
            game = Game(name=name, spaces=spaces, prefs=(), utils=tuple(utils))
            game = derive_pref_from_utility(game)
        else:
            include_p = 0.2 if config.property_t_pair else 0.35
            prefs = []
            for i in range(config.players):
                table = {}
                for x in itertools.product(*label_sets):
                    better = frozenset(
                        y
                        for y in label_sets[i]
                        if (not config.irreflexive or y != x[i])
                        and rng.random() < include_p
                    )
                    table[x] = better
                prefs.append(FiniteTable(i + 1, table))
            game = Game(name=name, spaces=spaces, prefs=tuple(prefs))
        game = _attach_comps(game, config)
        if not checks:
            return game
        verdicts = check_hypotheses(game, checks)
        if all(v.status == "holds" for v in verdicts.values()):
            return game
    raise GameError(
        f"constraint unsatisfiable after {config.retries} attempts"
    )


def discretize(game: Game, step) -> Game:
    """Finite snapshot of a continuum game on an even rational grid.

    The grid is refined with every piece-cell endpoint so no cell falls
    between grid points; tables come from evaluating at grid profiles and
    keeping the grid members.
    """
    if game.is_finite:
        raise GameError("discretize needs interval spaces")
    step = Fraction(step)
    if step <= 0:
        raise GameError("grid step must be positive")
    groups = [game.prefs]
    if game.comps is not None:
        groups.append(game.comps)
    axes: list[list[Fraction]] = []
    for j in range(game.n):
        carrier = game.carrier(j)
        points: set[Fraction] = set()
        for part in carrier.parts:
            span = part.hi.value - part.lo.value
            if span % step != 0:
                raise GameError(
                    f"grid step {step} does not divide the span of "
                    f"{part.render()}"
                )
            k = 0
            while part.lo.value + k * step <= part.hi.value:
                points.add(part.lo.value + k * step)
                k += 1
        for group in groups:
            for corr in group:
                for piece in corr.pieces:
                    for b in piece.cell.factors[j].parts:
                        points.add(b.lo.value)
                        points.add(b.hi.value)
        axes.append(sorted(p for p in points if carrier.contains(p)))
    spaces = tuple(FiniteSpace(tuple(str(p) for p in ax)) for ax in axes)
    axis_pairs = [list(zip(s.labels, ax)) for s, ax in zip(spaces, axes)]

    def tabulate(corr, i: int) -> FiniteTable:
        vals = axes[i]
        labs = spaces[i].labels
        table = {}
        for combo in itertools.product(*axis_pairs):
            profile = tuple(c[0] for c in combo)
            frac = tuple(c[1] for c in combo)
            value = eval_value(game, corr, frac)
            members: list[str] = []
            # grid points inside each part, located by binary search
            for part in value:
                a = bisect.bisect_left(vals, part.lo.value)
                if a < len(vals) and vals[a] == part.lo.value and not part.lo.closed:
                    a += 1
                b = bisect.bisect_right(vals, part.hi.value)
                if b > 0 and vals[b - 1] == part.hi.value and not part.hi.closed:
                    b -= 1
                members.extend(labs[a:b])
            table[profile] = frozenset(members)
        return FiniteTable(i + 1, table)

    prefs = tuple(tabulate(c, i) for i, c in enumerate(game.prefs))
    comps = (
        tuple(tabulate(c, i) for i, c in enumerate(game.comps))
        if game.comps is not None
        else None
    )
    return Game(
        name=f"{game.name}-grid-{step}",
        spaces=spaces,
        prefs=prefs,
        comps=comps,
    )


@dataclass
class EnumerationResult:
    pairings: list[Pairing]
    condition_D_everywhere: bool
    visited: int

    @property
    def order_dependent(self) -> bool:
        return len(self.pairings) > 1


def enumerate_maximal_reductions(
    game: Game, op: Operator, bound: int = 16, track_condition_D: bool = False
) -> EnumerationResult:
    """Every maximal pairing reachable by single-strategy eliminations.

    Exhaustive depth-first walk with memoized pairings; games larger than
    the bound (product of strategy counts) are refused.
    """
    if not game.is_finite:
        raise GameError("enumeration needs finite spaces")
    size = 1
    for i in range(game.n):
        size *= len(game.labels(i))
    if size > bound:
        raise BoundExceeded(
            f"game size {size} exceeds the enumeration bound {bound}",
            size,
            bound,
        )
    orders = [
        {s: k for k, s in enumerate(game.labels(i))} for i in range(game.n)
    ]
    seen: set[Pairing] = set()
    results: dict[tuple, Pairing] = {}
    d_holds = True

    def visit(h: Pairing) -> None:
        nonlocal d_holds
        if h in seen:
            return
        seen.add(h)
        if track_condition_D and check_condition_D(game, h).status != "holds":
            d_holds = False
        moves = [
            (i, y)
            for i in range(game.n)
            for y in sorted(eliminated_region(game, h, i, op), key=orders[i].__getitem__)
        ]
        progressed = False
        for i, y in moves:
            try:
                post, _, _ = path_step(game, h, op, {i: frozenset({y})})
            except InvalidRemoval:
                # a lone removal may be invalid even when a batch is not
                continue
            progressed = True
            visit(post)
        if not progressed:
            key = tuple(
                tuple(sorted(f, key=orders[i].__getitem__))
                for i, f in enumerate(h)
            )
            results[key] = h

    visit(full_pairing(game))
    ordered = [results[k] for k in sorted(results)]
    return EnumerationResult(
        pairings=ordered,
        condition_D_everywhere=d_holds,
        visited=len(seen),
    )


CHECK_NAMES = (
    "limit-containment",
    "c-implies-d",
    "confluence",
    "preservation",
    "stagewise-agreement",
)

# opaque ids accepted on the command line for the same checks
CHECK_ALIASES = {
    "lemma1": "limit-containment",
    "lemma2": "c-implies-d",
    "theorem3": "confluence",
    "theorem10": "preservation",
    "seq": "stagewise-agreement",
}


def resolve_check_name(name: str) -> str:
    canon = CHECK_ALIASES.get(name, name)
    if canon not in CHECK_NAMES:
        raise GameError(f"unknown fuzz check {name!r}")
    return canon


@dataclass(frozen=True)
class FuzzConfig:
    trials: int = 100
    seed: int = 0
    players: int = 2
    sizes: tuple[int, ...] = (3, 3)
    mode: str = MODE_UTILITY
    irreflexive: bool = False
    property_t_pair: bool = False
    with_q_reflexive: bool = False
    payoff_lo: int = 0
    payoff_hi: int = 2
    checks: tuple[str, ...] = CHECK_NAMES
    ops: tuple[Operator, ...] = (Operator.TAIL, Operator.DOUBLE)
    oracle_bound: int = 16


@dataclass
class Finding:
    check: str
    trial: int
    seed: int
    detail: str
    game_text: str
    shrunk_game_text: str | None = None

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "trial": self.trial,
            "seed": self.seed,
            "detail": self.detail,
            "game": self.game_text,
        }
        if self.shrunk_game_text is not None:
            out["shrunk_game"] = self.shrunk_game_text
        return out


@dataclass
class TrialRecord:
    trial: int
    seed: int
    game_name: str
    limits: dict[str, str]
    order_dependent: bool | None
    violations: list[str] = field(default_factory=list)


@dataclass
class FuzzReport:
    config: FuzzConfig
    records: list[TrialRecord]
    findings: list[Finding]

    @property
    def violation_count(self) -> int:
        return len(self.findings)

    @property
    def order_dependence_count(self) -> int:
        return sum(1 for r in self.records if r.order_dependent)

    def to_dict(self) -> dict:
        return {
            "trials": self.config.trials,
            "seed": self.config.seed,
            "mode": self.config.mode,
            "sizes": list(self.config.sizes),
            "checks": list(self.config.checks),
            "violation_count": self.violation_count,
            "order_dependence_count": self.order_dependence_count,
            "records": [
                {
                    "trial": r.trial,
                    "seed": r.seed,
                    "game": r.game_name,
                    "limits": r.limits,
                    "order_dependent": r.order_dependent,
                    "violations": r.violations,
                }
                for r in self.records
            ],
            "findings": [f.to_dict() for f in self.findings],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "trial",
                "seed",
                "game",
                "tail_limit",
                "double_limit",
                "order_dependent",
                "violations",
            ]
        )
        for r in self.records:
            writer.writerow(
                [
                    r.trial,
                    r.seed,
                    r.game_name,
                    r.limits.get("tail", ""),
                    r.limits.get("double", ""),
                    "" if r.order_dependent is None else str(r.order_dependent).lower(),
                    ";".join(r.violations),
                ]
            )
        return buf.getvalue()


def _stage_at(trace: ReductionTrace, t: int) -> Pairing:
    return trace.stages[t] if t < len(trace.stages) else trace.stages[-1]


def _check_limit_containment(game, traces) -> str | None:
    tail = traces[Operator.TAIL].final
    double = traces[Operator.DOUBLE].final
    if any(factor_is_empty(f) for f in tail + double):
        return None
    for i in range(game.n):
        if not tail[i] <= double[i]:
            extra = ",".join(sorted(tail[i] - double[i]))
            return f"player {i + 1}: tail limit keeps {{{extra}}} outside the double limit"
    return None


def _check_c_implies_d(game, traces) -> str | None:
    for op, trace in traces.items():
        for t, h in enumerate(trace.stages):
            c = check_condition_C(game, h)
            if c.status != "holds":
                continue
            d = check_condition_D(game, h)
            if d.status != "holds":
                return (
                    f"op {op.value} stage {t}: condition C holds but D fails "
                    f"at {d.witness}"
                )
    return None


def _check_stagewise_agreement(game, traces) -> str | None:
    ta = traces[Operator.TAIL]
    td = traces[Operator.DOUBLE]
    for t in range(max(len(ta.stages), len(td.stages))):
        a = _stage_at(ta, t)
        b = _stage_at(td, t)
        if a != b:
            return f"stage {t}: tail and double traces diverge with the D premise intact"
        if check_condition_D(game, a).status != "holds":
            break
    return None


def _check_confluence(game, traces, bound: int):
    try:
        enum = enumerate_maximal_reductions(
            game, Operator.DOUBLE, bound, track_condition_D=True
        )
    except BoundExceeded:
        return None, None
    detail = None
    if enum.condition_D_everywhere:
        fast_final = traces[Operator.DOUBLE].final
        if len(enum.pairings) != 1:
            detail = (
                f"condition D held everywhere yet {len(enum.pairings)} "
                "maximal reductions are reachable"
            )
        elif enum.pairings[0] != fast_final:
            detail = "the unique enumerated limit differs from the fast limit"
    return enum, detail


def _check_preservation(game, traces) -> str | None:
    report = check_preservation(game, traces[Operator.DOUBLE].final)
    if report.label == "THEOREM-VIOLATION":
        return (
            "maximal elements changed under reduction although every "
            f"hypothesis held; witness {report.witness}"
        )
    return None


def _violation_detail(game, check: str, bound: int) -> str | None:
    traces = {
        op: star_reduce(game, op) for op in (Operator.TAIL, Operator.DOUBLE)
    }
    if check == "limit-containment":
        return _check_limit_containment(game, traces)
    if check == "c-implies-d":
        return _check_c_implies_d(game, traces)
    if check == "stagewise-agreement":
        return _check_stagewise_agreement(game, traces)
    if check == "confluence":
        _, detail = _check_confluence(game, traces, bound)
        return detail
    if check == "preservation":
        return _check_preservation(game, traces)
    raise GameError(f"unknown fuzz check {check!r}")


def _shrink(game: Game, check: str, bound: int) -> Game:
    """Greedy single-strategy removals preserving the violation."""
    current = game
    improved = True
    while improved:
        improved = False
        for i in range(current.n):
            labels = current.labels(i)
            if len(labels) <= 1:
                continue
            for lab in labels:
                h = tuple(
                    frozenset(current.labels(j)) - ({lab} if j == i else set())
                    for j in range(current.n)
                )
                candidate = restrict(current, h)
                if _violation_detail(candidate, check, bound) is not None:
                    current = candidate
                    improved = True
                    break
            if improved:
                break
    return current


def fuzz(config: FuzzConfig) -> FuzzReport:
    records: list[TrialRecord] = []
    findings: list[Finding] = []
    for t in range(config.trials):
        trial_seed = config.seed * 1_000_003 + t
        game = generate_game(
            GeneratorConfig(
                players=config.players,
                sizes=config.sizes,
                seed=trial_seed,
                mode=config.mode,
                irreflexive=config.irreflexive,
                property_t_pair=config.property_t_pair,
                with_q_reflexive=config.with_q_reflexive,
                payoff_lo=config.payoff_lo,
                payoff_hi=config.payoff_hi,
            )
        )
        traces = {op: star_reduce(game, op) for op in config.ops}
        for op in (Operator.TAIL, Operator.DOUBLE):
            if op not in traces:
                traces[op] = star_reduce(game, op)
        limits = {
            op.value: json.dumps(
                render_pairing(game, trace.final), separators=(",", ":")
            )
            for op, trace in sorted(traces.items(), key=lambda kv: kv[0].value)
        }
        order_dependent = None
        violations: list[str] = []
        for check in config.checks:
            if check == "confluence":
                enum, detail = _check_confluence(game, traces, config.oracle_bound)
                if enum is not None:
                    order_dependent = enum.order_dependent
            else:
                detail = _violation_detail_given(
                    game, check, traces, config.oracle_bound
                )
            if detail is not None:
                violations.append(check)
                shrunk = _shrink(game, check, config.oracle_bound)
                findings.append(
                    Finding(
                        check=check,
                        trial=t,
                        seed=trial_seed,
                        detail=detail,
                        game_text=serialize_game(game),
                        shrunk_game_text=(
                            serialize_game(shrunk) if shrunk is not game else None
                        ),
                    )
                )
        records.append(
            TrialRecord(
                trial=t,
                seed=trial_seed,
                game_name=game.name,
                limits=limits,
                order_dependent=order_dependent,
                violations=violations,
            )
        )
    return FuzzReport(config=config, records=records, findings=findings)


def _violation_detail_given(game, check: str, traces, bound: int) -> str | None:
    if check == "limit-containment":
        return _check_limit_containment(game, traces)
    if check == "c-implies-d":
        return _check_c_implies_d(game, traces)
    if check == "stagewise-agreement":
        return _check_stagewise_agreement(game, traces)
    if check == "preservation":
        return _check_preservation(game, traces)
    raise GameError(f"unknown fuzz check {check!r}")
