#!/usr/bin/env python3
"""
Recompute metrics.json from predictions.csv
===========================================

Independent check of a run directory: counts come from the prediction
column, ratios are recomputed from the counts, and AUC is recomputed by
pairwise concordance on the stored scores.

Usage:
    python -m scripts.recompute_metrics runs/latest
    python scripts/recompute_metrics.py runs/latest --tolerance 1e-9

Exit code 0 when every number matches, 1 otherwise.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from qfuzz.logging_setup import setup_logging

logger = logging.getLogger("recompute_metrics")


def ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def recompute(predictions: pd.DataFrame) -> Dict[str, float]:
    labels = predictions["label"].to_numpy(dtype=int)
    predicted = predictions["prediction"].to_numpy(dtype=int)
    scores = predictions["score"].to_numpy(dtype=float)

    tp = int(np.sum((predicted == 1) & (labels == 1)))
    fp = int(np.sum((predicted == 1) & (labels == 0)))
    tn = int(np.sum((predicted == 0) & (labels == 0)))
    fn = int(np.sum((predicted == 0) & (labels == 1)))
    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    values = {
        "tp": tp, "fp": fp, "tn": tn, "fn": fn,
        "accuracy": (tp + tn) / len(labels),
        "precision": precision,
        "recall": recall,
        "f1": ratio(2 * precision * recall, precision + recall),
        "fp_rate": ratio(fp, fp + tn),
        "fn_rate": ratio(fn, fn + tp),
        "fd_rate": ratio(fp, fp + tp),
    }

    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if pos.size and neg.size:
        greater = np.sum(pos[:, None] > neg[None, :])
        ties = np.sum(pos[:, None] == neg[None, :])
        values["auc"] = float((2 * greater + ties) / (2 * pos.size * neg.size))
    return values


def compare(run_dir: Path, tolerance: float) -> List[str]:
    """Return a list of mismatch descriptions (empty when all agree)."""
    metrics = json.loads((run_dir / "metrics.json").read_text(encoding="utf-8"))
    predictions = pd.read_csv(run_dir / "predictions.csv")
    values = recompute(predictions)

    stored: Dict[str, float] = dict(metrics["summary"]["counts"])
    stored.update({k: v for k, v in metrics["summary"].items() if isinstance(v, (int, float))})
    if metrics.get("auc") is not None:
        stored["auc"] = metrics["auc"]

    mismatches = []
    if metrics.get("n_test") != len(predictions):
        mismatches.append(f"n_test: stored {metrics.get('n_test')}, predictions has {len(predictions)} row(s)")
    for key, value in stored.items():
        if key not in values:
            mismatches.append(f"{key}: cannot be recomputed")
        elif abs(values[key] - value) > tolerance:
            mismatches.append(f"{key}: stored {value}, recomputed {values[key]}")
    return mismatches


def main() -> int:
    parser = argparse.ArgumentParser(description="Recompute metrics.json from predictions.csv.")
    parser.add_argument("run_dir", type=str)
    parser.add_argument("--tolerance", type=float, default=1e-9,
                        help="Absolute tolerance (scores are stored with 12 decimals).")
    args = parser.parse_args()
    setup_logging("INFO")

    mismatches = compare(Path(args.run_dir), args.tolerance)
    if mismatches:
        for line in mismatches:
            logger.error(f"❌ {line}")
        return 1
    logger.info(f"✅ Every number in {args.run_dir}/metrics.json matches predictions.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
