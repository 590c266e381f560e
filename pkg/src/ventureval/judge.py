"""Rating sheets and collective-judgment aggregation.

Evaluators score a venture on a fixed Likert schema; sheets aggregate by
unweighted per-criterion means, the composite maps to a success
probability by min-max rescaling, and composite/label pairs can train a
crowd-based CART classifier.

Two schemas ship: ``CROWD7`` (1-7; feasibility, scalability, desirability)
and ``MENTOR10`` (1-10; desirability, implementability, scalability,
profitability). ``MENTOR10`` is the default round schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .learn import LabeledDataset, Tree, cart_fit


class JudgeError(ValueError):
    pass


@dataclass(frozen=True)
class RatingSchema:
    name: str
    criteria: tuple[str, ...]
    scale_min: int
    scale_max: int

    def __post_init__(self):
        if self.scale_min >= self.scale_max:
            raise JudgeError("scale_min must be below scale_max")
        if not self.criteria:
            raise JudgeError("schema needs at least one criterion")


CROWD7 = RatingSchema(
    name="crowd7",
    criteria=("feasibility", "scalability", "desirability"),
    scale_min=1,
    scale_max=7,
)

MENTOR10 = RatingSchema(
    name="mentor10",
    criteria=("desirability", "implementability", "scalability", "profitability"),
    scale_min=1,
    scale_max=10,
)

SCHEMAS = {s.name: s for s in (CROWD7, MENTOR10)}


@dataclass
class RatingSheet:
    evaluator_id: str
    venture_id: str
    round_id: str
    scores: dict[str, int]
    qualitative: dict[str, str] | None = None  # business-model dimension -> text
    crowd_kind: str = "expert"  # expert | non_expert


@dataclass(frozen=True)
class CriterionScores:
    means: dict[str, float]
    counts: dict[str, int]
    composite: float
    n_sheets: int


def validate_sheet(schema: RatingSchema, sheet: RatingSheet) -> list[str]:
    problems = []
    for c in schema.criteria:
        if c not in sheet.scores:
            problems.append(f"missing criterion {c!r}")
            continue
        v = sheet.scores[c]
        if not isinstance(v, (int, np.integer)):
            problems.append(f"criterion {c!r} score must be an integer")
        elif not schema.scale_min <= v <= schema.scale_max:
            problems.append(
                f"criterion {c!r} score {v} outside "
                f"[{schema.scale_min}, {schema.scale_max}]"
            )
    for c in sheet.scores:
        if c not in schema.criteria:
            problems.append(f"unknown criterion {c!r}")
    return problems


def aggregate_unweighted(
    schema: RatingSchema, sheets: Sequence[RatingSheet]
) -> CriterionScores:
    """Arithmetic mean per criterion; composite is the mean of the means."""
    if not sheets:
        raise JudgeError("no sheets to aggregate")
    for sheet in sheets:
        problems = validate_sheet(schema, sheet)
        if problems:
            raise JudgeError(
                f"invalid sheet from evaluator {sheet.evaluator_id!r}: "
                + "; ".join(problems)
            )
    means = {
        c: float(np.mean([s.scores[c] for s in sheets])) for c in schema.criteria
    }
    composite = float(np.mean(list(means.values())))
    return CriterionScores(
        means=means,
        counts={c: len(sheets) for c in schema.criteria},
        composite=composite,
        n_sheets=len(sheets),
    )


def composite_to_probability(cs: CriterionScores, schema: RatingSchema) -> float:
    """Min-max rescale of the composite onto [0, 1].

    This linear mapping is a deliberate, documented choice; swap it for a
    fitted link if calibration data becomes available.
    """
    return (cs.composite - schema.scale_min) / (schema.scale_max - schema.scale_min)


def crowd_classifier_fit(
    rating_vectors: Sequence[tuple[Sequence[float], int]],
    *,
    criteria: Sequence[str] | None = None,
    max_depth: int | None = None,
    min_leaf: int = 1,
) -> Tree:
    """CART over per-criterion mean features and binary outcome labels."""
    if len(rating_vectors) < 2:
        raise JudgeError("need at least 2 rated ventures")
    x = np.array([list(v) for v, _ in rating_vectors], dtype=np.float64)
    y = np.array([label for _, label in rating_vectors], dtype=np.int8)
    if len(np.unique(y)) < 2:
        raise JudgeError("need both outcome labels")
    names = list(criteria) if criteria else [f"criterion_{i}" for i in range(x.shape[1])]
    ds = LabeledDataset(
        x=x, y=y, feature_names=names, feature_kinds=["numeric"] * x.shape[1]
    )
    return cart_fit(ds, max_depth=max_depth, min_leaf=min_leaf)


def aggregates_to_csv(
    schema: RatingSchema, rows: Sequence[tuple[str, CriterionScores]]
) -> str:
    """Per-round aggregate export: one row per (round, CriterionScores)."""
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["round_id", *schema.criteria, "composite", "n_sheets"])
    for round_id, cs in rows:
        w.writerow(
            [
                round_id,
                *(f"{cs.means[c]:.6f}" for c in schema.criteria),
                f"{cs.composite:.6f}",
                cs.n_sheets,
            ]
        )
    return buf.getvalue()


def simulate_crowd(
    seed: int,
    true_quality: float,
    n_raters: int,
    noise_sd: float,
    schema: RatingSchema = MENTOR10,
    *,
    venture_id: str = "sim",
    round_id: str = "sim",
) -> list[RatingSheet]:
    """Seeded noisy raters around a true quality on the schema's scale."""
    if n_raters < 1:
        raise JudgeError("n_raters must be >= 1")
    rng = np.random.default_rng(seed)
    sheets = []
    for i in range(n_raters):
        scores = {}
        for c in schema.criteria:
            raw = true_quality + (rng.normal(0.0, noise_sd) if noise_sd > 0 else 0.0)
            scores[c] = int(np.clip(round(raw), schema.scale_min, schema.scale_max))
        sheets.append(
            RatingSheet(
                evaluator_id=f"rater{i}",
                venture_id=venture_id,
                round_id=round_id,
                scores=scores,
                crowd_kind="non_expert",
            )
        )
    return sheets
