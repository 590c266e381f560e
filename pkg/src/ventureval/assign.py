"""Expertise profiles and evaluator matching.

An item to evaluate carries a topic signature (term frequencies of its
texts) and required expertise tags; an evaluator has static tags plus a
dynamic signature accumulated from past contributions, weighted by the
quality those contributions earned. Matching blends tag overlap and
signature cosine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

STANDARD_TAGS = ("market", "technology", "finance")

_TOKEN = re.compile(r"[a-z0-9][a-z0-9'&+-]*")


class AssignError(ValueError):
    pass


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files("ventureval.data").joinpath("stopwords.txt").read_text(
        encoding="utf-8"
    )
    return frozenset(
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


def extract_topics(text: str) -> dict[str, float]:
    """Term-frequency signature: lowercase tokens, stop words removed,
    weights normalized to sum 1. Empty text gives an empty signature."""
    tokens = [t for t in _TOKEN.findall(text.lower()) if t not in stopwords()]
    if not tokens:
        return {}
    total = len(tokens)
    sig: dict[str, float] = {}
    for t in tokens:
        sig[t] = sig.get(t, 0.0) + 1.0
    return {t: w / total for t, w in sig.items()}


def _normalize(sig: dict[str, float]) -> dict[str, float]:
    total = sum(sig.values())
    if total <= 0:
        return {}
    return {t: w / total for t, w in sig.items() if w > 0}


def cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if not a or not b:
        return 0.0
    dot = sum(w * b.get(t, 0.0) for t, w in a.items())
    na = np.sqrt(sum(w * w for w in a.values()))
    nb = np.sqrt(sum(w * w for w in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    return float(dot / (na * nb))


@dataclass
class Contribution:
    signature: dict[str, float]
    quality: float
    timestamp: float


@dataclass
class AdaptiveProfile:
    evaluator_id: str
    static_tags: set[str] = field(default_factory=set)
    dynamic: dict[str, float] = field(default_factory=dict)
    contribution_log: list[Contribution] = field(default_factory=list)
    decay: float = 1.0


@dataclass(frozen=True)
class EvaluationItem:
    item_id: str
    signature: dict[str, float]
    required_tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Assignment:
    item_id: str
    ranked: tuple[tuple[str, float], ...]  # (evaluator_id, score), descending
    chosen: tuple[str, ...]


def match_score(
    item: EvaluationItem, profile: AdaptiveProfile, alpha: float = 0.5
) -> float:
    """alpha * tag overlap + (1 - alpha) * signature cosine, in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise AssignError("alpha must be in [0, 1]")
    required = item.required_tags
    overlap = len(required & profile.static_tags) / max(1, len(required))
    return alpha * overlap + (1.0 - alpha) * cosine(item.signature, profile.dynamic)


def assign(
    item: EvaluationItem,
    profiles: list[AdaptiveProfile],
    m: int = 7,
    *,
    alpha: float = 0.5,
    seed: int = 0,
    outstanding: dict[str, int] | None = None,
) -> Assignment:
    """Top-m evaluators by match score.

    Ties break by fewest outstanding assignments, then by a seeded draw.
    Raises when fewer than m profiles exist.
    """
    if m < 1:
        raise AssignError("m must be >= 1")
    if len(profiles) < m:
        raise AssignError(
            f"need {m} evaluators but only {len(profiles)} profiles registered "
            f"(short by {m - len(profiles)})"
        )
    outstanding = outstanding or {}
    rng = np.random.default_rng(seed)
    jitter = {p.evaluator_id: rng.random() for p in profiles}
    scored = [(match_score(item, p, alpha), p.evaluator_id) for p in profiles]
    ranked = sorted(
        scored,
        key=lambda sv: (
            -sv[0],
            outstanding.get(sv[1], 0),
            jitter[sv[1]],
            sv[1],
        ),
    )
    return Assignment(
        item_id=item.item_id,
        ranked=tuple((eid, s) for s, eid in ranked),
        chosen=tuple(eid for _, eid in ranked[:m]),
    )


def clamp_m(m: int, bounds: tuple[int, int] = (5, 10)) -> int:
    """Service-side guard keeping crowd sizes in the effective range."""
    lo, hi = bounds
    return max(lo, min(hi, m))


def update_profile(
    profile: AdaptiveProfile,
    text: str,
    quality: float,
    *,
    timestamp: float = 0.0,
) -> AdaptiveProfile:
    """Fold a contribution into the dynamic signature.

    dynamic <- normalize(decay * dynamic + quality * topics(text)); the
    contribution log keeps enough to replay the exact same sequence.
    """
    if not 0.0 <= quality <= 1.0:
        raise AssignError("quality must be in [0, 1]")
    sig = extract_topics(text)
    merged: dict[str, float] = {
        t: profile.decay * w for t, w in profile.dynamic.items()
    }
    for t, w in sig.items():
        merged[t] = merged.get(t, 0.0) + quality * w
    profile.dynamic = _normalize(merged)
    profile.contribution_log.append(
        Contribution(signature=sig, quality=quality, timestamp=timestamp)
    )
    return profile


def replay_dynamic(profile: AdaptiveProfile) -> dict[str, float]:
    """Recompute the dynamic signature from the contribution log."""
    dynamic: dict[str, float] = {}
    for entry in profile.contribution_log:
        merged = {t: profile.decay * w for t, w in dynamic.items()}
        for t, w in entry.signature.items():
            merged[t] = merged.get(t, 0.0) + entry.quality * w
        dynamic = _normalize(merged)
    return dynamic
