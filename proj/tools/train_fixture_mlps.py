#!/usr/bin/env python3
"""Regenerate the fixed MLP fixtures in data/.

Development helper only; the C++ build never runs it. Trains a small
scikit-learn MLP per dataset on min-max normalized features and exports the
weights in the pacexp model format, together with sklearn's own predictions
on the training rows (used by the tests as an independent oracle).
"""

import argparse
import json
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.neural_network import MLPClassifier

HIDDEN = (8, 8)


def normalize(frame):
    out = frame.astype(float).copy()
    for c in out.columns:
        lo, hi = out[c].min(), out[c].max()
        out[c] = 0.0 if hi == lo else (out[c] - lo) / (hi - lo)
    return out


def export(clf, features, path):
    layers = []
    n = len(clf.coefs_)
    for i, (w, b) in enumerate(zip(clf.coefs_, clf.intercepts_)):
        w = w.T.tolist()
        b = b.tolist()
        last = i == n - 1
        if last and len(clf.classes_) == 2:
            # logistic output z -> logits (0, z): argmax picks class 1 iff z > 0
            w = [[0.0] * len(w[0])] + w
            b = [0.0] + b
        layers.append({"w": w, "b": b, "act": "id" if last else "relu"})
    model = {
        "type": "mlp",
        "arity": len(features),
        "classes": [str(c) for c in clf.classes_],
        "features": list(features),
        "layers": layers,
    }
    Path(path).write_text(json.dumps(model, indent=1) + "\n")


def train(csv, label, out_model, out_pred, seed):
    df = pd.read_csv(csv)
    y = df[label].astype(str)
    x = normalize(df.drop(columns=[label]))
    clf = MLPClassifier(hidden_layer_sizes=HIDDEN, max_iter=5000, random_state=seed)
    clf.fit(x.values, y.values)
    export(clf, x.columns, out_model)
    pred = clf.predict(x.values).tolist()
    Path(out_pred).write_text(json.dumps({"rows": x.values.tolist(), "predicted": pred}) + "\n")
    print(f"{csv}: train accuracy {clf.score(x.values, y.values):.3f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=Path(__file__).resolve().parent.parent / "data", type=Path)
    ap.add_argument("--seed", default=0, type=int)
    a = ap.parse_args()
    train(a.data / "iris.csv", "class", a.data / "iris_mlp.json", a.data / "iris_mlp_predictions.json", a.seed)
    train(a.data / "zoo.csv", "type", a.data / "zoo_mlp.json", a.data / "zoo_mlp_predictions.json", a.seed)


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    main()
