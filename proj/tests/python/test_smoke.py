import numpy as np
import pytest

import lungpipe


def test_phantom_pipeline():
    suite = lungpipe.phantom_suite(count=4, seed=11)
    assert len(suite) == 4
    labels = {ph["label"] for ph in suite}
    assert labels <= {0, 1}

    ph = suite[0]
    img = ph["image"]
    assert img.dtype == np.uint16
    assert img.shape == (128, 128)

    med = lungpipe.median_filter(img, rows=3, cols=3)
    assert med.shape == img.shape
    eq = lungpipe.equalize_histogram(med, levels=64)
    assert eq.dtype == np.uint16

    grad = lungpipe.sobel_gradient(med)
    assert grad.shape == img.shape and grad.min() >= 0.0

    lungs = lungpipe.segment_lungs(med)
    assert lungs.dtype == bool
    assert lungpipe.dice(lungs, ph["lung_mask"]) >= 0.90


def test_feature_extraction():
    ph = lungpipe.phantom_suite(count=1, seed=3)[0]
    med = lungpipe.median_filter(ph["image"])
    rec = lungpipe.extract_features(med, lungpipe.segment_lungs(med), id="ph0")
    assert rec["id"] == "ph0"
    assert rec["area"] > 0 and rec["perimeter"] > 0
    assert 0.0 <= rec["entropy"] <= 16.0
    assert set(rec) >= {"area", "perimeter", "stddev", "skewness", "kurtosis", "entropy"}


def _write_csv(path, n_per_class=20):
    rng = np.random.default_rng(0)
    lines = ["id,area,perimeter,stddev,skewness,kurtosis,entropy,label"]
    for i in range(2 * n_per_class):
        label = i % 2
        row = [
            f"r{i}",
            f"{500 + 80 * rng.standard_normal():.6f}",
            f"{110 + 4 * rng.standard_normal() + 32 * label:.6f}",
            f"{1400 + 150 * rng.standard_normal() + 1200 * label:.6f}",
            f"{0.5 + 0.25 * rng.standard_normal():.6f}",
            f"{3.2 + 0.5 * rng.standard_normal():.6f}",
            f"{4.5 + 0.5 * rng.standard_normal() + 4 * label:.6f}",
            str(label),
        ]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def test_train_save_load_evaluate(tmp_path):
    csv = tmp_path / "features.csv"
    _write_csv(csv)

    assert len(lungpipe.MODEL_KINDS) == 8
    model = lungpipe.train(str(csv), "knn", predictors="three")
    assert model.kind == "knn"
    assert list(model.predictors) == list(lungpipe.THREE_PREDICTORS)

    row = {"area": 500.0, "perimeter": 142.0, "stddev": 2600.0,
           "skewness": 0.5, "kurtosis": 3.2, "entropy": 8.5}
    assert model.predict(row) == 1

    out = tmp_path / "knn.json"
    model.save(str(out))
    loaded = lungpipe.Model.load(str(out))
    assert loaded.kind == "knn"
    assert loaded.predict(row) == 1

    scores = lungpipe.evaluate(loaded, str(csv))
    assert scores["accuracy"] >= 0.9
    assert scores["tp"] + scores["fp"] + scores["tn"] + scores["fn"] == 40


def test_errors(tmp_path):
    csv = tmp_path / "features.csv"
    _write_csv(csv)
    with pytest.raises(ValueError):
        lungpipe.train(str(csv), "perceptron")
    with pytest.raises(ValueError):
        lungpipe.median_filter(np.zeros((4, 4), dtype=np.uint16), rows=2)
