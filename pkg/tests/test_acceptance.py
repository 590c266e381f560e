"""Acceptance gate: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS lines. Every test is self-contained and seeds all randomness.
"""

import itertools
import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from tests.conftest import random_valid_model
from tests.test_cluster import brute_force_two_cluster_cost
from tests.test_qca import oracle_min_cover, oracle_primes
from ventureval import cluster, fuse, judge, learn, qca, schema
from ventureval.cli import main as cli_main
from ventureval.service import ServiceConfig, create_app


def ok(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_kmodes_exhaustive_partition_oracle():
    """n<=8 binary instances, k=2, 50 restarts: >=95/100 hit the global
    optimum; per-iteration cost never increases; under 10 s."""
    start = time.perf_counter()
    hits = 0
    total = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 9))
        rows = [tuple(int(v) for v in rng.integers(0, 2, size=3)) for _ in range(n)]
        if len(set(rows)) < 2:
            rows[0] = (1 - rows[0][0], rows[0][1], rows[0][2])
        fit = cluster.kmodes_fit(rows, 2, seed=seed, restarts=50)
        costs = fit.iteration_costs
        assert all(b <= a for a, b in zip(costs, costs[1:])), "cost increased"
        total += 1
        if fit.cost == brute_force_two_cluster_cost(rows):
            hits += 1
    elapsed = time.perf_counter() - start
    assert total == 100
    assert hits >= 95, f"only {hits}/100 hit the exhaustive optimum"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    ok(f"kmodes oracle ({hits}/100 optimal, monotone costs, {elapsed:.1f}s)")


def test_silhouette_k_selection_planted():
    """Planted 3-cluster dataset (30 rows): chosen_k == 3 on 20/20 seeds,
    all silhouettes within [-1, 1]; under 5 s."""
    start = time.perf_counter()
    base = [(0,) * 6, (1,) * 6, (2,) * 6]  # cross-distance 6 >= 4, within 0
    rows = [base[i % 3] for i in range(30)]
    for seed in range(20):
        sel = cluster.select_k(rows, 2, 30, restarts=5, seed=seed)
        assert sel.chosen_k == 3, f"seed {seed} chose {sel.chosen_k}"
        for rec in sel.records:
            assert -1.0 <= rec.silhouette <= 1.0
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    ok(f"silhouette k-selection (20/20 chose k=3, {elapsed:.1f}s)")


def test_forest_importances_and_runtime():
    """50 seeded fixtures: importances sum to 1 +/- 1e-9, constant feature
    exactly 0, planted feature ranked first >= 48/50; the 1000-tree default
    is wired; one 1000-tree fit on 200 rows stays under 60 s."""
    import inspect

    assert inspect.signature(learn.forest_fit).parameters["n_trees"].default == 1000

    firsts = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        x = rng.integers(0, 2, size=(100, 10)).astype(np.float64)
        x[:, 7] = 1.0  # constant column
        y = x[:, 2].astype(np.int8)
        flip = rng.random(100) < 0.05
        y[flip] = 1 - y[flip]
        ds = learn.LabeledDataset(
            x=x, y=y, feature_names=[f"f{i}" for i in range(10)]
        )
        forest = learn.forest_fit(ds, n_trees=100, seed=seed)
        imp = learn.feature_importance(forest)
        assert sum(imp.weights.values()) == pytest.approx(1.0, abs=1e-9)
        assert imp.weights["f7"] == 0.0
        assert all(w >= 0 for w in imp.weights.values())
        if max(imp.weights, key=imp.weights.get) == "f2":
            firsts += 1
    assert firsts >= 48, f"planted feature first in only {firsts}/50"

    rng = np.random.default_rng(123)
    x = rng.integers(0, 2, size=(200, 108)).astype(np.float64)
    y = ((x[:, 0] + x[:, 50] + rng.random(200) * 0.5) > 1.2).astype(np.int8)
    if len(np.unique(y)) < 2:
        y[0] = 1 - y[0]
    big = learn.LabeledDataset(
        x=x, y=y, feature_names=[f"f{i}" for i in range(108)]
    )
    start = time.perf_counter()
    forest = learn.forest_fit(big, seed=0)  # default 1000 trees
    elapsed = time.perf_counter() - start
    assert forest.n_trees == 1000
    assert elapsed < 60.0, f"1000-tree fit took {elapsed:.1f}s"
    ok(
        f"forest importances ({firsts}/50 planted-first, sums exact, "
        f"1000 trees in {elapsed:.1f}s)"
    )


def test_logistic_gradient_finite_differences():
    """Analytic gradient within 1e-5 relative of central differences on 20
    random weight vectors."""
    rng = np.random.default_rng(42)
    x = rng.integers(0, 2, size=(40, 6)).astype(np.float64)
    y = rng.integers(0, 2, size=40).astype(np.float64)
    h = 1e-6
    for _ in range(20):
        w = rng.normal(size=6)
        b = float(rng.normal())
        _, gw, gb = learn.logistic_nll_grad(w, b, x, y)
        for j in range(6):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            fd = (
                learn.logistic_nll_grad(wp, b, x, y)[0]
                - learn.logistic_nll_grad(wm, b, x, y)[0]
            ) / (2 * h)
            assert abs(gw[j] - fd) / max(abs(fd), 1e-8) < 1e-5
        fdb = (
            learn.logistic_nll_grad(w, b + h, x, y)[0]
            - learn.logistic_nll_grad(w, b - h, x, y)[0]
        ) / (2 * h)
        assert abs(gb - fdb) / max(abs(fdb), 1e-8) < 1e-5
    ok("logistic gradient vs central finite differences (20 vectors, rel < 1e-5)")


def test_mcc_symmetry_and_hand_cases():
    """Class-swap symmetry on 1000 random confusion matrices plus the
    pinned hand values."""
    assert fuse.mcc(fuse.ConfusionMatrix(tp=5, tn=5, fp=0, fn=0)) == 1.0
    assert fuse.mcc(fuse.ConfusionMatrix(tp=1, tn=1, fp=1, fn=1)) == 0.0
    assert fuse.mcc(fuse.ConfusionMatrix(tp=4, tn=3, fp=1, fn=2)) == pytest.approx(
        0.408, abs=1e-3
    )
    rng = np.random.default_rng(0)
    for _ in range(1000):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 40, size=4))
        a = fuse.mcc(fuse.ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn))
        b = fuse.mcc(fuse.ConfusionMatrix(tp=tn, tn=tp, fp=fn, fn=fp))
        assert a == pytest.approx(b, abs=1e-12)
        assert -1.0 <= a <= 1.0
    ok("MCC symmetry (1000 matrices) and hand cases (1.0 / 0.0 / 0.408)")


def test_hybrid_dominance_and_weighting():
    """Equal-weight fusion of independently noisy predictors beats the
    best individual in >= 90/100 seeds; performance weighting is at least
    as good as unweighted in >= 85/100 seeds when MCCs differ by >= 0.3;
    under 10 s."""
    start = time.perf_counter()
    dominance_wins = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        truth = rng.uniform(0.2, 0.8, size=200)
        machine = np.clip(truth + rng.normal(0, 0.2, 200), 0, 1)
        crowd = np.clip(truth + rng.normal(0, 0.2, 200), 0, 1)
        hybrid = 0.5 * machine + 0.5 * crowd
        mse = lambda p: float(np.mean((p - truth) ** 2))
        if mse(hybrid) <= min(mse(machine), mse(crowd)):
            dominance_wins += 1
    assert dominance_wins >= 90, f"{dominance_wins}/100"

    weighting_wins = 0
    gaps = []
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = 400
        y = (rng.random(n) < 0.5).astype(int)
        sign = 2.0 * y - 1.0

        def predictor(strength):
            raw = 0.5 + 0.5 * strength * sign + rng.normal(0, 0.18, n)
            return np.clip(raw, 0.01, 0.99)

        p_a = predictor(0.9)
        p_b = predictor(0.16)
        mcc_a = fuse.mcc(fuse.confusion_from_predictions(y, p_a))
        mcc_b = fuse.mcc(fuse.confusion_from_predictions(y, p_b))
        gaps.append(abs(mcc_a - mcc_b))
        assert abs(mcc_a - mcc_b) >= 0.3, "construction must keep the gap"
        pt = fuse.PerformanceTable(
            entries=(
                fuse.PerfEntry("a", "machine", (mcc_a,), 0),
                fuse.PerfEntry("b", "crowd", (mcc_b,), 0),
            ),
            k=1,
            seed=seed,
            threshold=0.5,
        )
        w_perf = fuse.weights_from_performance(pt, "hybrid_perf")
        w_flat = fuse.weights_from_performance(pt, "unweighted")
        fused_perf = np.array(
            [
                fuse.hybrid_predict({"a": pa, "b": pb}, w_perf)
                for pa, pb in zip(p_a, p_b)
            ]
        )
        fused_flat = np.array(
            [
                fuse.hybrid_predict({"a": pa, "b": pb}, w_flat)
                for pa, pb in zip(p_a, p_b)
            ]
        )
        mcc_perf = fuse.mcc(fuse.confusion_from_predictions(y, fused_perf))
        mcc_flat = fuse.mcc(fuse.confusion_from_predictions(y, fused_flat))
        if mcc_perf >= mcc_flat:
            weighting_wins += 1
    elapsed = time.perf_counter() - start
    assert weighting_wins >= 85, f"{weighting_wins}/100"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    ok(
        f"hybrid dominance ({dominance_wins}/100) and performance weighting "
        f"({weighting_wins}/100, min gap {min(gaps):.2f}, {elapsed:.1f}s)"
    )


def test_crowd_aggregation_invariance_and_noise_reduction():
    """Permutation invariance is exact; aggregate dispersion decreases
    monotonically over n_raters in {1, 5, 20} across 100 seeds."""
    rng = np.random.default_rng(3)
    for _ in range(20):
        sheets = judge.simulate_crowd(
            int(rng.integers(1 << 30)), 6.0, 9, 1.5, judge.MENTOR10
        )
        cs = judge.aggregate_unweighted(judge.MENTOR10, sheets)
        perm = [sheets[i] for i in rng.permutation(len(sheets))]
        cs2 = judge.aggregate_unweighted(judge.MENTOR10, perm)
        assert cs.means == cs2.means  # exact, not approximate
        assert cs.composite == cs2.composite
    sds = []
    for n in (1, 5, 20):
        composites = [
            judge.aggregate_unweighted(
                judge.MENTOR10, judge.simulate_crowd(seed, 5.5, n, 1.0, judge.MENTOR10)
            ).composite
            for seed in range(100)
        ]
        sds.append(float(np.std(composites)))
    assert sds[0] > sds[1] > sds[2], sds
    ok(
        "crowd aggregation (permutation-exact; sd "
        f"{sds[0]:.3f} > {sds[1]:.3f} > {sds[2]:.3f} over raters 1/5/20)"
    )


def test_fsqca_exhaustive_oracle_and_constants():
    """Crisp Quine-McCluskey equals the brute-force prime-implicant +
    exact-cover oracle on every 3-condition pattern with <= 4 positives;
    bundled thresholds and row counts match; calibration hits the
    crossover anchor exactly; under 30 s."""
    start = time.perf_counter()
    combos = list(itertools.product((0, 1), repeat=3))
    checked = 0
    for pattern in range(256):
        statuses = [(pattern >> i) & 1 for i in range(8)]
        if sum(statuses) > 4:
            continue
        cs = qca.FuzzyCaseSet(
            conditions=("c0", "c1", "c2"),
            memberships=np.array(combos, dtype=float),
            outcome=np.array(statuses, dtype=float),
        )
        tt = qca.build_truth_table(cs)
        sol = qca.minimize_parsimonious(tt)
        positives = [combos[i] for i in range(8) if statuses[i]]
        negatives = [combos[i] for i in range(8) if not statuses[i]]
        if not positives:
            assert sol.empty
            checked += 1
            continue
        got = sorted(t.implicant.literals for t in sol.terms)
        want = sorted(
            p.literals
            for p in oracle_min_cover(oracle_primes(positives, negatives, 3), positives)
        )
        assert got == want, f"pattern {pattern}"
        checked += 1
    assert checked == 163  # sum C(8,i), i=0..4

    # wired defaults and the 2^k row count
    import inspect

    sig = inspect.signature(qca.build_truth_table)
    assert sig.parameters["freq"].default == 1
    assert sig.parameters["cons"].default == 0.9
    rng = np.random.default_rng(0)
    cs6 = qca.FuzzyCaseSet(
        conditions=tuple(f"c{i}" for i in range(6)),
        memberships=rng.random((12, 6)),
        outcome=rng.random(12),
    )
    assert len(qca.build_truth_table(cs6).rows) == 64

    anchors = qca.CalibrationAnchors(
        full_non_membership=2.0, crossover=5.0, full_membership=11.0
    )
    assert qca.calibrate_direct([5.0], anchors)[0] == 0.5  # exact
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    ok(
        f"fsQCA oracle (163 exhaustive patterns), defaults (1, 0.9), 64-row "
        f"k=6 table, crossover -> 0.5 exact ({elapsed:.1f}s)"
    )


def test_service_end_to_end_flow():
    """Scripted venture -> round (m=5 of 8 mentors) -> 5 sheets ->
    guidance with an exactly recomputable hybrid; restart keeps every
    committed sheet; mentor surfaces never leak peer scores; under 20 s."""
    import tempfile

    start = time.perf_counter()
    taxonomy = schema.bundled_taxonomy()
    admin = {"Authorization": "Bearer admin-token"}
    founder = {"Authorization": "Bearer entrepreneur-token"}
    with tempfile.TemporaryDirectory() as tmp:
        config = ServiceConfig(store_dir=tmp)
        app = create_app(config)
        with TestClient(app) as client:
            tokens = {}
            for i in range(8):
                r = client.post(
                    "/mentors",
                    json={
                        "mentor_id": f"mentor{i}",
                        "token": f"tk{i}",
                        "static_tags": ["market"] if i % 2 == 0 else ["finance"],
                    },
                    headers=admin,
                )
                assert r.status_code == 201
                tokens[f"mentor{i}"] = f"tk{i}"
            rng = np.random.default_rng(0)
            model = random_valid_model(taxonomy, rng, "flagship")
            r = client.post(
                "/ventures",
                json={
                    "venture_id": "flagship",
                    "tags": ["market"],
                    "model": {
                        "choices": {d: sorted(v) for d, v in model.choices.items()},
                        "free_text": {"Revenue Model": "subscription analytics"},
                    },
                },
                headers=founder,
            )
            assert r.status_code == 201
            rnd = client.post(
                "/ventures/flagship/rounds", json={"m": 5}, headers=founder
            ).json()
            assert len(rnd["assignments"]) == 5
            criteria = (
                "desirability",
                "implementability",
                "scalability",
                "profitability",
            )
            for i, a in enumerate(rnd["assignments"]):
                scores = dict(zip(criteria, (9 - i, 8, 7, 6)))
                r = client.post(
                    f"/assignments/{a['assignment_id']}/rating",
                    json={
                        "scores": scores,
                        "qualitative": {"Customer": f"focus suggestion {i}"},
                    },
                    headers={"Authorization": f"Bearer {tokens[a['mentor_id']]}"},
                )
                assert r.status_code == 201
            g = client.get("/ventures/flagship/guidance", headers=founder).json()
            info = g["informative"]
            recomputed = sum(
                info["weights"][k]
                * {
                    "crowd": info["crowd_probability"],
                    "machine": info["machine_probability"],
                }[k]
                for k in info["weights"]
            )
            assert info["hybrid_probability"] == recomputed  # exact equality
            assert info["n_sheets"] == 5

            # anti-cascade audit on every mentor-reachable surface
            watcher = rnd["assignments"][4]["mentor_id"]
            peers = {a["mentor_id"] for a in rnd["assignments"] if a["mentor_id"] != watcher}
            mine = client.get(
                "/mentors/me/assignments",
                headers={"Authorization": f"Bearer {tokens[watcher]}"},
            )
            text = json.dumps(mine.json())
            for peer in peers:
                assert peer not in text
            for blocked in (
                "/ventures/flagship/guidance",
                "/ventures/flagship/rounds",
                "/ventures/flagship",
            ):
                resp = client.get(
                    blocked, headers={"Authorization": f"Bearer {tokens[watcher]}"}
                )
                assert resp.status_code == 403

        app.state.engine.store.close()
        # restart: committed sheets all survive
        app2 = create_app(ServiceConfig(store_dir=tmp))
        with TestClient(app2) as client2:
            g2 = client2.get("/ventures/flagship/guidance", headers=founder).json()
            assert g2["informative"]["n_sheets"] == 5
            assert g2["informative"]["criterion_means"] == g["informative"][
                "criterion_means"
            ]
        app2.state.engine.store.close()
    elapsed = time.perf_counter() - start
    assert elapsed < 20.0, f"took {elapsed:.1f}s"
    ok(f"service end-to-end flow with restart and anti-cascade audit ({elapsed:.1f}s)")


def test_cli_determinism(tmp_path):
    """Repeated seeded CLI runs produce hash-identical outputs."""
    from importlib import resources

    ventures = tmp_path / "ventures.csv"
    ventures.write_text(
        resources.files("ventureval.data")
        .joinpath("fixtures/demo_ventures.csv")
        .read_text(encoding="utf-8")
    )
    jobs = [
        [
            "cluster",
            "--ventures",
            str(ventures),
            "--component",
            "Revenues",
            "--k-min",
            "2",
            "--k-max",
            "5",
            "--restarts",
            "4",
            "--seed",
            "13",
        ],
        ["train", "--ventures", str(ventures), "--n-trees", "20", "--seed", "13"],
        [
            "simulate-crowd",
            "--seed",
            "13",
            "--true-quality",
            "6",
            "--raters",
            "9",
        ],
    ]
    for i, job in enumerate(jobs):
        a, b = tmp_path / f"run_a{i}", tmp_path / f"run_b{i}"
        assert cli_main(job + ["--out", str(a)]) == 0
        assert cli_main(job + ["--out", str(b)]) == 0
        ha = json.loads((a / "manifest.json").read_text())["outputs"]
        hb = json.loads((b / "manifest.json").read_text())["outputs"]
        assert ha == hb, f"outputs differ for {job[0]}"
    ok("CLI determinism (cluster/train/simulate-crowd hash-identical)")
