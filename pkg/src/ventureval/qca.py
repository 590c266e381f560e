"""Fuzzy-set configurational analysis.

Pipeline: calibrate raw condition values to set memberships (direct
method, log-odds interpolation between min/median/max anchors), build the
2^k truth table with frequency and consistency thresholds, minimize the
positive rows with Quine-McCluskey, and score solution terms with
consistency / raw coverage / unique coverage.

The parsimonious solution may use every remainder row as a don't-care;
the intermediate solution admits only remainders that agree with the
stated directional expectations. Literals appearing in the parsimonious
solution are the "core" conditions; literals appearing only in the
intermediate solution are "peripheral".
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

MAX_CONDITIONS = 16  # exact 2^k enumeration guard

PRESENT, ABSENT, FREE = 1, 0, 2  # literal states within an implicant


class QcaError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationAnchors:
    full_non_membership: float  # typically the observed minimum
    crossover: float  # typically the observed median
    full_membership: float  # typically the observed maximum
    target_low: float = 0.05
    target_mid: float = 0.5
    target_high: float = 0.95

    def __post_init__(self):
        if not (
            self.full_non_membership < self.crossover < self.full_membership
        ):
            raise QcaError(
                "anchors must satisfy full_non_membership < crossover < "
                "full_membership"
            )
        if not 0 < self.target_low < self.target_mid < self.target_high < 1:
            raise QcaError("targets must be ordered within (0, 1)")


def anchors_from_sample(values: Sequence[float]) -> CalibrationAnchors:
    arr = np.asarray(values, dtype=np.float64)
    return CalibrationAnchors(
        full_non_membership=float(arr.min()),
        crossover=float(np.median(arr)),
        full_membership=float(arr.max()),
    )


def calibrate_direct(
    values: Sequence[float], anchors: CalibrationAnchors
) -> np.ndarray:
    """Direct calibration: anchors map to their target memberships, with
    log-odds linear interpolation between them and clipping beyond."""
    lo = math.log(anchors.target_low / (1 - anchors.target_low))
    mid = math.log(anchors.target_mid / (1 - anchors.target_mid))
    hi = math.log(anchors.target_high / (1 - anchors.target_high))
    out = np.empty(len(values), dtype=np.float64)
    for i, v in enumerate(values):
        if v <= anchors.full_non_membership:
            out[i] = anchors.target_low
        elif v >= anchors.full_membership:
            out[i] = anchors.target_high
        elif v == anchors.crossover:
            out[i] = anchors.target_mid
        elif v < anchors.crossover:
            frac = (v - anchors.full_non_membership) / (
                anchors.crossover - anchors.full_non_membership
            )
            logodds = lo + frac * (mid - lo)
            out[i] = 1.0 / (1.0 + math.exp(-logodds))
        else:
            frac = (v - anchors.crossover) / (
                anchors.full_membership - anchors.crossover
            )
            logodds = mid + frac * (hi - mid)
            out[i] = 1.0 / (1.0 + math.exp(-logodds))
    return out


@dataclass(frozen=True)
class FuzzyCaseSet:
    conditions: tuple[str, ...]
    memberships: np.ndarray  # cases x conditions, in [0, 1]
    outcome: np.ndarray  # cases, in [0, 1]
    case_ids: tuple[str, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.memberships, dtype=np.float64)
        o = np.asarray(self.outcome, dtype=np.float64)
        object.__setattr__(self, "memberships", m)
        object.__setattr__(self, "outcome", o)
        if m.ndim != 2 or m.shape[1] != len(self.conditions):
            raise QcaError("memberships must be cases x conditions")
        if o.shape != (m.shape[0],):
            raise QcaError("outcome length must match case count")
        if ((m < 0) | (m > 1)).any() or ((o < 0) | (o > 1)).any():
            raise QcaError("memberships must lie in [0, 1]")
        if not self.case_ids:
            object.__setattr__(
                self, "case_ids", tuple(f"case{i}" for i in range(m.shape[0]))
            )


def row_membership(case: Sequence[float], combination: Sequence[int]) -> float:
    """Fuzzy AND of the case's (possibly negated) condition memberships."""
    if len(case) != len(combination):
        raise QcaError("case does not cover all conditions")
    value = 1.0
    for mem, bit in zip(case, combination):
        value = min(value, mem if bit == 1 else 1.0 - mem)
    return value


@dataclass(frozen=True)
class TruthTableRow:
    combination: tuple[int, ...]
    count: int
    consistency: float
    status: Literal["positive", "negative", "remainder"]


@dataclass(frozen=True)
class TruthTable:
    conditions: tuple[str, ...]
    rows: tuple[TruthTableRow, ...]
    frequency_threshold: int
    consistency_threshold: float
    case_set: FuzzyCaseSet

    @property
    def k(self) -> int:
        return len(self.conditions)


def build_truth_table(
    cs: FuzzyCaseSet, freq: int = 1, cons: float = 0.9
) -> TruthTable:
    """All 2^k combinations with case counts and subset consistency.

    A case belongs to the row where its membership exceeds 0.5 (at most
    one such row). Row consistency is sum(min(row, outcome)) /
    sum(row). Rows below the frequency threshold are remainders.
    """
    k = len(cs.conditions)
    if k > MAX_CONDITIONS:
        raise QcaError(f"{k} conditions exceed the exact-enumeration guard "
                       f"({MAX_CONDITIONS})")
    if k == 0:
        raise QcaError("no conditions")
    rows = []
    for bits in itertools.product((0, 1), repeat=k):
        mem = np.array(
            [row_membership(case, bits) for case in cs.memberships]
        )
        count = int((mem > 0.5).sum())
        denom = float(mem.sum())
        consistency = (
            float(np.minimum(mem, cs.outcome).sum()) / denom if denom > 0 else 0.0
        )
        if count < freq:
            status = "remainder"
        elif consistency >= cons:
            status = "positive"
        else:
            status = "negative"
        rows.append(
            TruthTableRow(
                combination=bits,
                count=count,
                consistency=consistency,
                status=status,
            )
        )
    return TruthTable(
        conditions=tuple(cs.conditions),
        rows=tuple(rows),
        frequency_threshold=freq,
        consistency_threshold=cons,
        case_set=cs,
    )


# -- Quine-McCluskey ----------------------------------------------------------


@dataclass(frozen=True)
class Implicant:
    """Condition literals: PRESENT, ABSENT, or FREE (don't-care)."""

    literals: tuple[int, ...]

    def covers(self, combination: Sequence[int]) -> bool:
        return all(
            lit == FREE or lit == bit
            for lit, bit in zip(self.literals, combination)
        )

    @property
    def literal_count(self) -> int:
        return sum(1 for lit in self.literals if lit != FREE)


@dataclass(frozen=True)
class SolutionTerm:
    implicant: Implicant
    consistency: float = 0.0
    raw_coverage: float = 0.0
    unique_coverage: float = 0.0


@dataclass(frozen=True)
class SolutionSet:
    kind: Literal["parsimonious", "intermediate"]
    conditions: tuple[str, ...]
    terms: tuple[SolutionTerm, ...]
    solution_consistency: float = 0.0
    solution_coverage: float = 0.0
    empty: bool = False  # no positive rows existed


def _merge(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...] | None:
    diff = -1
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            if x == FREE or y == FREE or diff >= 0:
                return None
            diff = i
    if diff < 0:
        return None
    merged = list(a)
    merged[diff] = FREE
    return tuple(merged)


def prime_implicants(
    on_rows: list[tuple[int, ...]], dc_rows: list[tuple[int, ...]]
) -> list[Implicant]:
    """Iterative adjacent merging over the ON and don't-care rows."""
    current = {tuple(r) for r in on_rows} | {tuple(r) for r in dc_rows}
    primes: set[tuple[int, ...]] = set()
    while current:
        merged_any: set[tuple[int, ...]] = set()
        used: set[tuple[int, ...]] = set()
        cur = sorted(current)
        for i, a in enumerate(cur):
            for b in cur[i + 1 :]:
                m = _merge(a, b)
                if m is not None:
                    merged_any.add(m)
                    used.add(a)
                    used.add(b)
        primes |= current - used
        current = merged_any
    return [Implicant(p) for p in sorted(primes)]


def _min_cover(
    primes: list[Implicant], on_rows: list[tuple[int, ...]]
) -> list[Implicant]:
    """Exact minimum cover of the ON rows.

    Objective: fewest terms, then fewest total literals, then
    lexicographically smallest literal tuple sequence.
    """
    if not on_rows:
        return []
    covering = [
        [p for p in primes if p.covers(row)] for row in on_rows
    ]
    for row, cands in zip(on_rows, covering):
        if not cands:
            raise QcaError(f"no implicant covers ON row {row}")

    # essential primes first
    chosen: list[Implicant] = []
    remaining = list(range(len(on_rows)))
    for ri in list(remaining):
        if len(covering[ri]) == 1:
            p = covering[ri][0]
            if p not in chosen:
                chosen.append(p)
    remaining = [
        ri for ri in remaining if not any(p.covers(on_rows[ri]) for p in chosen)
    ]
    if not remaining:
        return _canonical_order(chosen)

    pool = sorted(
        {p for ri in remaining for p in covering[ri]},
        key=lambda p: p.literals,
    )
    best: list[Implicant] | None = None
    for size in range(1, len(pool) + 1):
        candidates = []
        for combo in itertools.combinations(pool, size):
            if all(
                any(p.covers(on_rows[ri]) for p in combo) for ri in remaining
            ):
                candidates.append(list(combo))
        if candidates:
            best = min(
                candidates,
                key=lambda terms: (
                    sum(t.literal_count for t in terms),
                    tuple(t.literals for t in terms),
                ),
            )
            break
    if best is None:
        raise QcaError("no cover found")
    return _canonical_order(chosen + best)


def _canonical_order(terms: list[Implicant]) -> list[Implicant]:
    return sorted(set(terms), key=lambda t: t.literals)


def _minimize(
    tt: TruthTable, dc_rows: list[tuple[int, ...]], kind: str
) -> SolutionSet:
    on_rows = [r.combination for r in tt.rows if r.status == "positive"]
    if not on_rows:
        return SolutionSet(
            kind=kind, conditions=tt.conditions, terms=(), empty=True
        )
    negative = [r.combination for r in tt.rows if r.status == "negative"]
    primes = prime_implicants(on_rows, dc_rows)
    # A prime grown over don't-cares must still avoid every negative row.
    primes = [
        p for p in primes if not any(p.covers(neg) for neg in negative)
    ]
    cover = _min_cover(primes, on_rows)
    sol = SolutionSet(
        kind=kind,
        conditions=tt.conditions,
        terms=tuple(SolutionTerm(implicant=p) for p in cover),
    )
    return solution_metrics(sol, tt.case_set)


def minimize_parsimonious(tt: TruthTable) -> SolutionSet:
    """Quine-McCluskey with every remainder admitted as a don't-care."""
    dc = [r.combination for r in tt.rows if r.status == "remainder"]
    return _minimize(tt, dc, "parsimonious")


def minimize_intermediate(
    tt: TruthTable, directional_expectations: dict[str, str] | None = None
) -> SolutionSet:
    """Quine-McCluskey admitting only remainders that agree with every
    stated directional expectation (condition -> present | absent | none)."""
    expectations = directional_expectations or {}
    for name, direction in expectations.items():
        if name not in tt.conditions:
            raise QcaError(f"unknown condition {name!r} in expectations")
        if direction not in ("present", "absent", "none"):
            raise QcaError(
                f"expectation for {name!r} must be present/absent/none"
            )
    wanted = {
        tt.conditions.index(name): (PRESENT if d == "present" else ABSENT)
        for name, d in expectations.items()
        if d != "none"
    }
    dc = [
        r.combination
        for r in tt.rows
        if r.status == "remainder"
        and all(r.combination[i] == v for i, v in wanted.items())
    ]
    return _minimize(tt, dc, "intermediate")


def _term_membership(implicant: Implicant, cs: FuzzyCaseSet) -> np.ndarray:
    mem = np.ones(cs.memberships.shape[0])
    for j, lit in enumerate(implicant.literals):
        if lit == PRESENT:
            mem = np.minimum(mem, cs.memberships[:, j])
        elif lit == ABSENT:
            mem = np.minimum(mem, 1.0 - cs.memberships[:, j])
    return mem


def solution_metrics(sol: SolutionSet, cs: FuzzyCaseSet) -> SolutionSet:
    """Fill consistency / raw / unique coverage per term and overall."""
    if not sol.terms:
        return sol
    outcome_sum = float(cs.outcome.sum())
    term_mem = [_term_membership(t.implicant, cs) for t in sol.terms]
    solution_mem = np.max(term_mem, axis=0)
    sol_inter = float(np.minimum(solution_mem, cs.outcome).sum())
    terms = []
    for i, (term, mem) in enumerate(zip(sol.terms, term_mem)):
        denom = float(mem.sum())
        inter = float(np.minimum(mem, cs.outcome).sum())
        if len(sol.terms) > 1:
            without = np.max(
                [m for j, m in enumerate(term_mem) if j != i], axis=0
            )
        else:
            without = np.zeros_like(mem)
        without_inter = float(np.minimum(without, cs.outcome).sum())
        terms.append(
            SolutionTerm(
                implicant=term.implicant,
                consistency=inter / denom if denom > 0 else 0.0,
                raw_coverage=inter / outcome_sum if outcome_sum > 0 else 0.0,
                unique_coverage=(
                    (sol_inter - without_inter) / outcome_sum
                    if outcome_sum > 0
                    else 0.0
                ),
            )
        )
    sol_denom = float(solution_mem.sum())
    return SolutionSet(
        kind=sol.kind,
        conditions=sol.conditions,
        terms=tuple(terms),
        solution_consistency=sol_inter / sol_denom if sol_denom > 0 else 0.0,
        solution_coverage=sol_inter / outcome_sum if outcome_sum > 0 else 0.0,
        empty=sol.empty,
    )


# -- reporting ----------------------------------------------------------------


def term_expression(term: SolutionTerm, conditions: Sequence[str]) -> str:
    parts = []
    for name, lit in zip(conditions, term.implicant.literals):
        if lit == PRESENT:
            parts.append(name)
        elif lit == ABSENT:
            parts.append(f"~{name}")
    return " * ".join(parts) if parts else "TRUE"


def solution_report(
    parsimonious: SolutionSet, intermediate: SolutionSet
) -> str:
    """Presence/absence chart per intermediate term.

    '●' core present, '•' peripheral present, '⊗' core absent, 'x'
    peripheral absent, blank: free. Core literals are those shared with
    the parsimonious solution.
    """
    conditions = intermediate.conditions
    core: set[tuple[int, int]] = set()
    for term in parsimonious.terms:
        for j, lit in enumerate(term.implicant.literals):
            if lit != FREE:
                core.add((j, lit))
    lines = []
    head = ["condition".ljust(28)] + [
        f"term {i + 1}".center(8) for i in range(len(intermediate.terms))
    ]
    lines.append("".join(head))
    for j, name in enumerate(conditions):
        row = [name.ljust(28)]
        for term in intermediate.terms:
            lit = term.implicant.literals[j]
            if lit == FREE:
                mark = ""
            elif lit == PRESENT:
                mark = "●" if (j, lit) in core else "•"
            else:
                mark = "⊗" if (j, lit) in core else "x"
            row.append(mark.center(8))
        lines.append("".join(row))
    lines.append(
        "consistency".ljust(28)
        + "".join(f"{t.consistency:.3f}".center(8) for t in intermediate.terms)
    )
    lines.append(
        "raw coverage".ljust(28)
        + "".join(f"{t.raw_coverage:.3f}".center(8) for t in intermediate.terms)
    )
    lines.append(
        "unique coverage".ljust(28)
        + "".join(f"{t.unique_coverage:.3f}".center(8) for t in intermediate.terms)
    )
    lines.append(
        f"overall solution consistency  {intermediate.solution_consistency:.3f}"
    )
    lines.append(
        f"overall solution coverage     {intermediate.solution_coverage:.3f}"
    )
    return "\n".join(lines) + "\n"


def load_cases_csv(
    text: str, outcome_column: str, *, calibrate: bool = True
) -> FuzzyCaseSet:
    """Cases from CSV: one column per condition plus the outcome column.

    With ``calibrate`` the raw values run through direct calibration with
    sample-derived anchors (min / median / max); otherwise values must
    already be memberships in [0, 1].
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise QcaError("empty cases CSV")
    if outcome_column not in reader.fieldnames:
        raise QcaError(f"outcome column {outcome_column!r} not in CSV")
    id_col = "case_id" if "case_id" in reader.fieldnames else None
    conditions = tuple(
        c for c in reader.fieldnames if c not in (outcome_column, id_col)
    )
    raw = []
    outcome = []
    ids = []
    for i, rec in enumerate(reader):
        raw.append([float(rec[c]) for c in conditions])
        outcome.append(float(rec[outcome_column]))
        ids.append(rec[id_col] if id_col else f"case{i}")
    mat = np.asarray(raw)
    out = np.asarray(outcome)
    if calibrate:
        cols = []
        for j in range(mat.shape[1]):
            cols.append(calibrate_direct(mat[:, j], anchors_from_sample(mat[:, j])))
        mat = np.stack(cols, axis=1)
        out = calibrate_direct(out, anchors_from_sample(out))
    return FuzzyCaseSet(
        conditions=conditions, memberships=mat, outcome=out, case_ids=tuple(ids)
    )
