"""Smoke tests for the statfuse python module.

Runs under pytest, or directly: python3 test_smoke.py
(PYTHONPATH must include the directory holding the built package).
"""

import math
import os
import tempfile

import numpy as np

import statfuse as sf


def _random_image(rng, h=32, w=32):
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def test_indicator_names_and_vector():
    names = sf.indicator_names()
    assert len(names) == 54
    assert names[0] == "mean_R"
    assert names[-1] == "ratio_G_B"

    rng = np.random.default_rng(1)
    v = sf.extract_indicators(_random_image(rng), levels=32, resize=False)
    assert v.shape == (54,)
    assert np.isfinite(v).all()
    by_name = dict(zip(names, v))
    hist_sum = sum(by_name[f"hist_bin_{b}_G"] for b in range(1, 6))
    assert abs(hist_sum - 1.0) < 1e-9


def test_resize_and_decode_roundtrip():
    rng = np.random.default_rng(2)
    img = _random_image(rng, 16, 16)
    out = sf.resize_bilinear(img, 224)
    assert out.shape == (224, 224, 3)
    assert np.array_equal(sf.resize_bilinear(out, 224), out)  # identity resize


def test_glcm_and_textural_features():
    grid = np.array([[0, 0], [1, 1]], dtype=np.uint8)
    g = sf.build_glcm(grid, 2)
    assert np.allclose(g, [[0.5, 0.0], [0.0, 0.5]])
    f = sf.textural_features(g)
    assert abs(f["entropy"] - math.log(2.0)) < 1e-12
    assert abs(f["average"] - 3.0) < 1e-12
    assert f["contrast"] == 0.0
    assert abs(f["correlation"] - 1.0) < 1e-12


def test_classifier_train_predict_save_load():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0, 1, (60, 4)), rng.normal(6, 1, (60, 4))])
    y = [0] * 60 + [1] * 60
    for kind in ("knn", "lda", "logreg", "rf"):
        model = sf.train_classifier(kind, X, y, seed=5, rf_trees=20)
        probs = model.predict_proba(X)
        assert probs.shape == (120, 2)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)
        assert (probs >= 0).all()
        assert sf.weighted_precision(y, model.predict(X), 2) > 0.95

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "model.json")
            model.save(path)
            loaded = sf.load_classifier(path)
            assert loaded.kind == kind
            assert np.array_equal(loaded.predict_proba(X), probs)


def test_fusion_and_metric():
    assert np.allclose(sf.fuse_average(np.array([0.8, 0.2]), np.array([0.4, 0.6])), [0.6, 0.4])
    assert math.isclose(sf.weighted_precision([0, 0, 1, 1], [0, 1, 1, 1], 2), 5.0 / 6.0,
                        rel_tol=1e-12)
    assert sf.weighted_precision([0, 0, 1, 1], [0, 0, 0, 0], 2) == 0.25


def test_errors_are_python_exceptions():
    try:
        sf.extract_indicators(np.zeros((1, 1, 3), dtype=np.uint8))
        raise AssertionError("expected InputError")
    except sf.InputError as e:
        assert "DegenerateSize" in str(e)
    try:
        sf.weighted_precision([], [], 2)
        raise AssertionError("expected InputError")
    except ValueError:
        pass  # InputError subclasses ValueError


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"ok   {name}")
            except Exception as exc:  # noqa: BLE001
                failures += 1
                print(f"FAIL {name}: {exc}")
    raise SystemExit(1 if failures else 0)
