"""HTTP API for the validation loop.

Roles are static bearer tokens: one admin, one entrepreneur, and one token
per registered mentor. Mentors only ever see their own assignments and
sheets; peer scores for open rounds are never served to the mentor role
(independent judgments, no cascades).
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import asdict
from typing import Any

import numpy as np
from fastapi import Depends, FastAPI, Header, HTTPException
from fastapi.responses import JSONResponse

from .. import assign as assign_mod
from .. import fuse, judge, learn, schema
from .config import ServiceConfig
from .store import Store, TrainedModelRecord


def _error(status: int, detail: Any):
    raise HTTPException(status_code=status, detail=detail)


class Engine:
    """Glue between the HTTP layer, the store, and the engine modules."""

    def __init__(self, config: ServiceConfig, store: Store, taxonomy=None):
        self.config = config
        self.store = store
        self.taxonomy = taxonomy or schema.bundled_taxonomy()

    # -- auth -----------------------------------------------------------

    def role_for(self, token: str) -> tuple[str, str | None]:
        if token == self.config.admin_token:
            return "admin", None
        if token == self.config.entrepreneur_token:
            return "entrepreneur", None
        for mentor in self.store.mentors.values():
            if mentor.token == token:
                return "mentor", mentor.mentor_id
        _error(401, "unknown token")

    # -- ventures ---------------------------------------------------------

    def _validated_model(self, venture_id: str, body: dict) -> schema.BusinessModel:
        choices = {
            dim: set(values) for dim, values in (body.get("choices") or {}).items()
        }
        model = schema.BusinessModel(
            venture_id=venture_id,
            choices=choices,
            free_text=body.get("free_text") or None,
        )
        report = schema.validate_model(self.taxonomy, model)
        if not report.ok:
            _error(
                422,
                {
                    "findings": [
                        {"code": f.code, "dimension": f.dimension, "message": f.message}
                        for f in report.findings
                    ]
                },
            )
        return model

    def create_venture(self, body: dict) -> dict:
        venture_id = body.get("venture_id") or f"v-{uuid.uuid4().hex[:10]}"
        if venture_id in self.store.ventures:
            _error(409, f"venture {venture_id!r} already exists")
        model = self._validated_model(venture_id, body.get("model") or {})
        self.store.append(
            "venture_created",
            {"venture_id": venture_id, "tags": body.get("tags") or []},
        )
        self.store.append(
            "model_saved",
            {
                "venture_id": venture_id,
                "version": 1,
                "choices": {d: sorted(v) for d, v in model.choices.items()},
                "free_text": model.free_text or {},
            },
        )
        return {"venture_id": venture_id, "version": 1}

    def put_model(self, venture_id: str, body: dict) -> dict:
        venture = self.store.ventures.get(venture_id)
        if venture is None:
            _error(404, f"unknown venture {venture_id!r}")
        model = self._validated_model(venture_id, body)
        version = len(venture.versions) + 1
        self.store.append(
            "model_saved",
            {
                "venture_id": venture_id,
                "version": version,
                "choices": {d: sorted(v) for d, v in model.choices.items()},
                "free_text": model.free_text or {},
            },
        )
        return {"venture_id": venture_id, "version": version}

    # -- rounds -----------------------------------------------------------

    def open_round(self, venture_id: str, body: dict) -> dict:
        venture = self.store.ventures.get(venture_id)
        if venture is None:
            _error(404, f"unknown venture {venture_id!r}")
        schema_name = body.get("schema") or self.config.default_schema
        if schema_name not in judge.SCHEMAS:
            _error(422, f"unknown rating schema {schema_name!r}")
        m = int(body.get("m") or self.config.default_m)
        m = assign_mod.clamp_m(m, self.config.m_bounds)
        mentors = list(self.store.mentors.values())
        if len(mentors) < m:
            _error(
                409,
                f"need {m} mentors but only {len(mentors)} registered",
            )
        required = body.get("required_tags")
        if required is None:
            required = venture.tags
        texts = " ".join((venture.latest.free_text or {}).values())
        item = assign_mod.EvaluationItem(
            item_id=venture_id,
            signature=assign_mod.extract_topics(texts),
            required_tags=frozenset(required),
        )
        profiles = [self._mentor_profile(mt.mentor_id) for mt in mentors]
        outstanding = self._outstanding_counts()
        seed = int(
            hashlib.sha256(f"{venture_id}:{len(self.store.rounds)}".encode()).hexdigest()[:8],
            16,
        )
        result = assign_mod.assign(
            item,
            profiles,
            m,
            alpha=self.config.alpha,
            seed=seed,
            outstanding=outstanding,
        )
        round_id = f"r-{uuid.uuid4().hex[:10]}"
        scores = dict((eid, s) for eid, s in result.ranked)
        assignments = [
            {
                "assignment_id": f"a-{uuid.uuid4().hex[:10]}",
                "round_id": round_id,
                "mentor_id": mentor_id,
                "match_score": scores[mentor_id],
            }
            for mentor_id in result.chosen
        ]
        self.store.append(
            "round_opened",
            {
                "round_id": round_id,
                "venture_id": venture_id,
                "model_version": venture.latest.version,
                "schema_name": schema_name,
                "m": m,
                "assignments": assignments,
            },
        )
        return {
            "round_id": round_id,
            "venture_id": venture_id,
            "model_version": venture.latest.version,
            "schema": schema_name,
            "assignments": assignments,
            "status": "open",
        }

    def _mentor_profile(self, mentor_id: str) -> assign_mod.AdaptiveProfile:
        mentor = self.store.mentors[mentor_id]
        profile = assign_mod.AdaptiveProfile(
            evaluator_id=mentor_id, static_tags=set(mentor.static_tags)
        )
        # Replay closed rounds: qualitative feedback plus rating agreement
        # feed the dynamic expertise signature.
        for rnd in sorted(self.store.rounds.values(), key=lambda r: r.created_at):
            if rnd.status != "closed" or mentor_id not in rnd.sheets:
                continue
            sheet = rnd.sheets[mentor_id]
            rating_schema = judge.SCHEMAS[rnd.schema_name]
            texts = " ".join((sheet.get("qualitative") or {}).values())
            quality = 0.5
            if rnd.aggregate:
                sheet_mean = float(
                    np.mean([sheet["scores"][c] for c in rating_schema.criteria])
                )
                span = rating_schema.scale_max - rating_schema.scale_min
                quality = 1.0 - abs(sheet_mean - rnd.aggregate["composite"]) / span
            assign_mod.update_profile(
                profile, texts, max(0.0, min(1.0, quality)), timestamp=rnd.closed_at or 0.0
            )
        return profile

    def _outstanding_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rnd in self.store.rounds.values():
            if rnd.status != "open":
                continue
            for a in rnd.assignments:
                if a.mentor_id not in rnd.sheets:
                    counts[a.mentor_id] = counts.get(a.mentor_id, 0) + 1
        return counts

    def close_round(self, round_id: str) -> dict:
        rnd = self.store.rounds.get(round_id)
        if rnd is None:
            _error(404, f"unknown round {round_id!r}")
        if rnd.status == "closed":
            _error(409, "round already closed")
        aggregate = None
        if rnd.sheets:
            rating_schema = judge.SCHEMAS[rnd.schema_name]
            sheets = [self._sheet_obj(rnd, mid) for mid in sorted(rnd.sheets)]
            cs = judge.aggregate_unweighted(rating_schema, sheets)
            aggregate = {
                "means": cs.means,
                "composite": cs.composite,
                "n_sheets": cs.n_sheets,
            }
        self.store.append(
            "round_closed", {"round_id": round_id, "aggregate": aggregate}
        )
        return {"round_id": round_id, "status": "closed", "aggregate": aggregate}

    @staticmethod
    def _sheet_obj(rnd, mentor_id) -> judge.RatingSheet:
        raw = rnd.sheets[mentor_id]
        return judge.RatingSheet(
            evaluator_id=mentor_id,
            venture_id=rnd.venture_id,
            round_id=rnd.round_id,
            scores={k: int(v) for k, v in raw["scores"].items()},
            qualitative=raw.get("qualitative") or None,
            crowd_kind=raw.get("crowd_kind", "expert"),
        )

    # -- ratings ----------------------------------------------------------

    def post_rating(self, assignment_id: str, mentor_id: str, body: dict) -> dict:
        target = None
        for rnd in self.store.rounds.values():
            for a in rnd.assignments:
                if a.assignment_id == assignment_id:
                    target = (rnd, a)
        if target is None:
            _error(404, f"unknown assignment {assignment_id!r}")
        rnd, assignment = target
        if assignment.mentor_id != mentor_id:
            _error(403, "assignment belongs to a different mentor")
        if rnd.status != "open":
            _error(409, "round is closed")
        rating_schema = judge.SCHEMAS[rnd.schema_name]
        sheet = judge.RatingSheet(
            evaluator_id=mentor_id,
            venture_id=rnd.venture_id,
            round_id=rnd.round_id,
            scores={k: int(v) for k, v in (body.get("scores") or {}).items()},
            qualitative=body.get("qualitative") or None,
            crowd_kind=body.get("crowd_kind", "expert"),
        )
        problems = judge.validate_sheet(rating_schema, sheet)
        if problems:
            _error(422, {"problems": problems})
        replaced = mentor_id in rnd.sheets
        self.store.append(
            "sheet_saved",
            {
                "round_id": rnd.round_id,
                "mentor_id": mentor_id,
                "sheet": {
                    "scores": sheet.scores,
                    "qualitative": sheet.qualitative or {},
                    "crowd_kind": sheet.crowd_kind,
                },
            },
        )
        return {
            "round_id": rnd.round_id,
            "assignment_id": assignment_id,
            "replaced": replaced,
        }

    def my_assignments(self, mentor_id: str) -> list[dict]:
        out = []
        for rnd in sorted(self.store.rounds.values(), key=lambda r: r.created_at):
            for a in rnd.assignments:
                if a.mentor_id != mentor_id:
                    continue
                venture = self.store.ventures[rnd.venture_id]
                snapshot = venture.versions[rnd.model_version - 1]
                out.append(
                    {
                        "assignment_id": a.assignment_id,
                        "round_id": rnd.round_id,
                        "venture_id": rnd.venture_id,
                        "round_status": rnd.status,
                        "schema": rnd.schema_name,
                        "model": {
                            "version": snapshot.version,
                            "choices": snapshot.choices,
                            "free_text": snapshot.free_text,
                        },
                        # own sheet only; peers are never serialized here
                        "my_sheet": rnd.sheets.get(mentor_id),
                    }
                )
        return out

    # -- guidance -----------------------------------------------------------

    def _machine_probability(self, venture) -> tuple[float | None, TrainedModelRecord | None]:
        record = self.store.latest_trained()
        if record is None:
            return None, None
        blob = self.store.read_model_blob(record)
        model = learn.model_from_dict(blob["model"])
        latest = venture.latest
        bm = schema.BusinessModel(
            venture_id=venture.venture_id,
            choices={d: set(v) for d, v in latest.choices.items()},
        )
        report = schema.validate_model(self.taxonomy, bm)
        if not report.ok:
            return None, record
        row = schema.encode_one_hot(self.taxonomy, bm).bits.astype(float)
        return float(learn.predict_proba(model, row)), record

    def _guidance_weights(
        self, machine_available: bool, record: TrainedModelRecord | None
    ) -> dict[str, float]:
        scheme = self.config.weighting_scheme
        if not machine_available:
            return {"crowd": 1.0}
        if scheme == "machine_perf":
            return {"machine": 1.0}
        if scheme == "crowd_perf":
            return {"crowd": 1.0}
        if scheme == "hybrid_perf" and record is not None:
            machine_mcc = max(0.0, record.holdout_mcc or 0.0)
            crowd_mcc = max(0.0, record.crowd_mcc or 0.0)
            total = machine_mcc + crowd_mcc
            if total > 0:
                return {
                    "machine": machine_mcc / total,
                    "crowd": crowd_mcc / total,
                }
        return {"machine": 0.5, "crowd": 0.5}

    def guidance(self, venture_id: str) -> dict:
        venture = self.store.ventures.get(venture_id)
        if venture is None:
            _error(404, f"unknown venture {venture_id!r}")
        rounds = self.store.rounds_for(venture_id)
        rated = [r for r in rounds if r.sheets]
        if not rated:
            _error(409, "no rated round for this venture yet")
        rnd = rated[-1]
        rating_schema = judge.SCHEMAS[rnd.schema_name]
        sheets = [self._sheet_obj(rnd, mid) for mid in sorted(rnd.sheets)]
        cs = judge.aggregate_unweighted(rating_schema, sheets)
        crowd_p = judge.composite_to_probability(cs, rating_schema)
        machine_p, record = self._machine_probability(venture)
        weights = self._guidance_weights(machine_p is not None, record)
        probs = {"crowd": crowd_p}
        if machine_p is not None:
            probs["machine"] = machine_p
        hybrid = fuse.hybrid_predict(
            probs, fuse.HybridWeights(scheme=self.config.weighting_scheme, weights=weights)
        )
        suggestive: dict[str, list[str]] = {}
        for sheet in sheets:
            for dim, text in (sheet.qualitative or {}).items():
                if text.strip():
                    suggestive.setdefault(dim, []).append(text)
        lineage = [
            {
                "round_id": r.round_id,
                "composite": r.aggregate["composite"] if r.aggregate else None,
                "closed_at": r.closed_at,
            }
            for r in rounds
            if r.status == "closed"
        ]
        report = {
            "venture_id": venture_id,
            "round_id": rnd.round_id,
            "schema": rnd.schema_name,
            "informative": {
                "criterion_means": cs.means,
                "composite": cs.composite,
                "n_sheets": cs.n_sheets,
                "crowd_probability": crowd_p,
                "machine_probability": machine_p,
                "machine_available": machine_p is not None,
                "hybrid_probability": hybrid,
                "weights": weights,
            },
            "suggestive": suggestive,
            "lineage": lineage,
        }
        self.store.append(
            "guidance_served",
            {
                "venture_id": venture_id,
                "round_id": rnd.round_id,
                "crowd_probability": crowd_p,
                "machine_probability": machine_p,
                "hybrid_probability": hybrid,
            },
        )
        return report

    # -- admin --------------------------------------------------------------

    def register_mentor(self, body: dict) -> dict:
        mentor_id = body.get("mentor_id") or f"m-{uuid.uuid4().hex[:10]}"
        if mentor_id in self.store.mentors:
            _error(409, f"mentor {mentor_id!r} already exists")
        token = body.get("token") or uuid.uuid4().hex
        self.store.append(
            "mentor_registered",
            {
                "mentor_id": mentor_id,
                "token": token,
                "static_tags": body.get("static_tags") or [],
                "bio": body.get("bio", ""),
            },
        )
        return {"mentor_id": mentor_id, "token": token}

    def post_label(self, body: dict) -> dict:
        venture_id = body.get("venture_id")
        if venture_id not in self.store.ventures:
            _error(404, f"unknown venture {venture_id!r}")
        if "series_a" not in body or body["series_a"] not in (0, 1):
            _error(422, "label needs series_a in {0,1}")
        data = {"venture_id": venture_id, "series_a": int(body["series_a"])}
        if "survival" in body and body["survival"] is not None:
            data["survival"] = int(body["survival"])
        self.store.append("label_saved", data)
        return data

    def retrain(self, body: dict) -> dict:
        seed = int(body.get("seed", 0))
        params = body.get("params") or {}
        snapshots = self.store.labeled_snapshots()
        if len(snapshots) < self.config.retrain_min_labeled:
            _error(
                409,
                f"need {self.config.retrain_min_labeled} labeled snapshots, "
                f"have {len(snapshots)}",
            )
        rows = []
        labels = []
        ids = []
        for vid, choices, label in sorted(snapshots):
            bm = schema.BusinessModel(
                venture_id=vid, choices={d: set(v) for d, v in choices.items()}
            )
            rows.append(schema.encode_one_hot(self.taxonomy, bm).bits)
            labels.append(label)
            ids.append(vid)
        ds = learn.LabeledDataset(
            x=np.array(rows, dtype=np.float64),
            y=np.array(labels, dtype=np.int8),
            feature_names=self.taxonomy.feature_names(),
            ids=ids,
        )
        if len(np.unique(ds.y)) < 2:
            _error(409, "labeled snapshots cover only one outcome class")
        n_trees = int(params.get("n_trees", 1000))
        max_depth = params.get("max_depth")
        holdout_mcc, crowd_mcc = self._holdout_performance(ds, seed, n_trees, max_depth)
        forest = learn.forest_fit(
            ds, n_trees=n_trees, seed=seed,
            max_depth=int(max_depth) if max_depth else None,
        )
        version = len(self.store.trained) + 1
        dataset_hash = hashlib.sha256(
            json.dumps([ids, labels, [r.tolist() for r in rows]]).encode()
        ).hexdigest()
        manifest = {
            "dataset_hash": dataset_hash,
            "n_rows": ds.n,
            "seed": seed,
            "params": {"n_trees": n_trees, "max_depth": max_depth},
        }
        path, digest = self.store.write_model_blob(
            version, {"manifest": manifest, "model": learn.model_to_dict(forest)}
        )
        self.store.append(
            "model_trained",
            {
                "version": version,
                "path": path,
                "sha256": digest,
                "manifest": manifest,
                "holdout_mcc": holdout_mcc,
                "crowd_mcc": crowd_mcc,
            },
        )
        return {
            "version": version,
            "sha256": digest,
            "holdout_mcc": holdout_mcc,
            "n_rows": ds.n,
        }

    def _holdout_performance(self, ds, seed, n_trees, max_depth):
        """Stratified 75/25 holdout MCC for the forest, plus the crowd's
        MCC over stored round composites when enough ventures have both."""
        holdout_mcc = None
        try:
            folds = fuse.kfold_split(ds.y, k=4, seed=seed)
            test_idx = folds[0]
            train_idx = np.setdiff1d(np.arange(ds.n), test_idx)
            model = learn.forest_fit(
                ds.subset(train_idx),
                n_trees=min(n_trees, 200),
                seed=seed,
                max_depth=int(max_depth) if max_depth else None,
            )
            proba = [learn.predict_proba(model, ds.x[i]) for i in test_idx]
            holdout_mcc = fuse.mcc(
                fuse.confusion_from_predictions(ds.y[test_idx], proba)
            )
        except (fuse.FuseError, learn.LearnError):
            pass
        crowd_mcc = None
        pairs = []
        for vid, label in self.labels_with_composites():
            pairs.append((label["probability"], label["series_a"]))
        if len(pairs) >= 4:
            proba = [p for p, _ in pairs]
            y = [l for _, l in pairs]
            crowd_mcc = fuse.mcc(fuse.confusion_from_predictions(y, proba))
        return holdout_mcc, crowd_mcc

    def labels_with_composites(self):
        out = []
        for vid, label in self.store.labels.items():
            if "series_a" not in label:
                continue
            rounds = [
                r
                for r in self.store.rounds_for(vid)
                if r.status == "closed" and r.aggregate
            ]
            if not rounds:
                continue
            rnd = rounds[-1]
            rating_schema = judge.SCHEMAS[rnd.schema_name]
            span = rating_schema.scale_max - rating_schema.scale_min
            prob = (rnd.aggregate["composite"] - rating_schema.scale_min) / span
            out.append(
                (vid, {"series_a": label["series_a"], "probability": prob})
            )
        return out


def create_app(
    config: ServiceConfig | None = None,
    store: Store | None = None,
    taxonomy=None,
) -> FastAPI:
    config = config or ServiceConfig()
    store = store or Store(config.store_dir)
    engine = Engine(config, store, taxonomy)
    app = FastAPI(title="ventureval", version="0.1.0")
    app.state.engine = engine

    def auth(authorization: str = Header(default="")) -> tuple[str, str | None]:
        token = authorization.removeprefix("Bearer ").strip()
        if not token:
            _error(401, "missing bearer token")
        return engine.role_for(token)

    def require(identity, *roles):
        if identity[0] not in roles:
            _error(403, f"requires role in {roles}")
        return identity

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/taxonomy")
    def get_taxonomy():
        t = engine.taxonomy
        return {
            "name": t.name,
            "version": t.version,
            "feature_width": t.feature_width,
            "layers": [
                {
                    "name": layer,
                    "sublayers": [
                        {
                            "name": sub,
                            "dimensions": [
                                {
                                    "name": d.name,
                                    "cardinality": "multi" if d.multi else "single",
                                    "characteristics": list(d.characteristics),
                                }
                                for d in t.dimensions
                                if d.sublayer == sub
                            ],
                        }
                        for sub in t.sublayer_names
                        if any(
                            d.sublayer == sub and d.layer == layer
                            for d in t.dimensions
                        )
                    ],
                }
                for layer in t.layer_names
            ],
        }

    @app.get("/schemas")
    def get_schemas():
        return {
            name: {
                "criteria": list(s.criteria),
                "scale_min": s.scale_min,
                "scale_max": s.scale_max,
            }
            for name, s in judge.SCHEMAS.items()
        }

    @app.post("/ventures", status_code=201)
    def post_venture(body: dict, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        return engine.create_venture(body)

    @app.get("/ventures/{venture_id}")
    def get_venture(venture_id: str, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        venture = engine.store.ventures.get(venture_id)
        if venture is None:
            _error(404, f"unknown venture {venture_id!r}")
        return {
            "venture_id": venture.venture_id,
            "tags": venture.tags,
            "versions": [asdict(v) for v in venture.versions],
        }

    @app.put("/ventures/{venture_id}/model")
    def put_model(venture_id: str, body: dict, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        return engine.put_model(venture_id, body)

    @app.post("/ventures/{venture_id}/rounds", status_code=201)
    def post_round(venture_id: str, body: dict, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        return engine.open_round(venture_id, body)

    @app.get("/ventures/{venture_id}/rounds")
    def get_rounds(venture_id: str, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        if venture_id not in engine.store.ventures:
            _error(404, f"unknown venture {venture_id!r}")
        out = []
        for rnd in engine.store.rounds_for(venture_id):
            out.append(
                {
                    "round_id": rnd.round_id,
                    "status": rnd.status,
                    "schema": rnd.schema_name,
                    "model_version": rnd.model_version,
                    "n_sheets": len(rnd.sheets),
                    "aggregate": rnd.aggregate,
                    "assignments": [asdict(a) for a in rnd.assignments],
                }
            )
        return out

    @app.post("/rounds/{round_id}/close")
    def close_round(round_id: str, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        return engine.close_round(round_id)

    @app.get("/mentors/me/assignments")
    def my_assignments(identity=Depends(auth)):
        role, mentor_id = require(identity, "mentor")
        return engine.my_assignments(mentor_id)

    @app.post("/assignments/{assignment_id}/rating", status_code=201)
    def post_rating(assignment_id: str, body: dict, identity=Depends(auth)):
        role, mentor_id = require(identity, "mentor")
        return engine.post_rating(assignment_id, mentor_id, body)

    @app.get("/ventures/{venture_id}/guidance")
    def get_guidance(venture_id: str, identity=Depends(auth)):
        require(identity, "entrepreneur", "admin")
        return engine.guidance(venture_id)

    @app.get("/ventures/{venture_id}/aggregates.csv")
    def get_aggregates_csv(venture_id: str, identity=Depends(auth)):
        from fastapi.responses import PlainTextResponse

        require(identity, "entrepreneur", "admin")
        if venture_id not in engine.store.ventures:
            _error(404, f"unknown venture {venture_id!r}")
        rows = []
        schema_name = engine.config.default_schema
        for rnd in engine.store.rounds_for(venture_id):
            if not rnd.sheets:
                continue
            schema_name = rnd.schema_name
            rating_schema = judge.SCHEMAS[rnd.schema_name]
            sheets = [engine._sheet_obj(rnd, mid) for mid in sorted(rnd.sheets)]
            rows.append((rnd.round_id, judge.aggregate_unweighted(rating_schema, sheets)))
        text = judge.aggregates_to_csv(judge.SCHEMAS[schema_name], rows)
        return PlainTextResponse(text, media_type="text/csv")

    @app.post("/mentors", status_code=201)
    def post_mentor(body: dict, identity=Depends(auth)):
        require(identity, "admin")
        return engine.register_mentor(body)

    @app.post("/admin/labels", status_code=201)
    def post_label(body: dict, identity=Depends(auth)):
        require(identity, "admin")
        return engine.post_label(body)

    @app.post("/admin/retrain", status_code=201)
    def post_retrain(body: dict, identity=Depends(auth)):
        require(identity, "admin")
        return engine.retrain(body)

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True))

    return app
