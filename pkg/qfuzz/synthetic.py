"""
QFuzz Sentiment - Synthetic Datasets
====================================

Small labeled datasets for tests and desk-scale benchmarks.

numeric: points in the unit square, label 1 iff f1 > f0, with every point
         at least `margin` away from the diagonal (|f1 - f0| >= margin).
         dim=4 appends two uniform noise columns.
tokens:  short "tweets" built from two disjoint sentiment vocabularies
         plus shared filler words, labeled "0" / "1" for the generic
         label scheme.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .errors import InvalidArgumentError

logger = logging.getLogger(__name__)

NEGATIVE_WORDS = (
    "awful", "terrible", "horrible", "disaster", "broken", "angry", "sad", "hate",
    "worst", "ugly", "boring", "painful", "rude", "dirty", "scary", "failure",
    "useless", "annoying", "gloomy", "nasty", "crash", "panic", "lonely", "toxic",
)
POSITIVE_WORDS = (
    "wonderful", "great", "amazing", "happy", "love", "brilliant", "joy", "best",
    "beautiful", "excellent", "fantastic", "delight", "smile", "friendly", "fresh",
    "success", "awesome", "cheerful", "lovely", "bright", "calm", "hero", "win", "kind",
)
FILLER_WORDS = (
    "today", "market", "weather", "people", "city", "morning", "news", "phone",
    "train", "coffee", "office", "weekend", "street", "store", "school", "music",
)


def _numeric(n: int, margin: float, rng: np.random.Generator, dim: int) -> pd.DataFrame:
    counts = {0: n // 2 + n % 2, 1: n // 2}
    rows = []
    for label, needed in counts.items():
        found = []
        while len(found) < needed:
            points = rng.uniform(0.0, 1.0, size=(4 * needed, 2))
            gap = points[:, 1] - points[:, 0] if label == 1 else points[:, 0] - points[:, 1]
            found.extend(points[gap >= margin].tolist())
        for f0, f1 in found[:needed]:
            rows.append((f0, f1, label))

    order = rng.permutation(len(rows))
    data = np.array([rows[i] for i in order])
    frame = pd.DataFrame({"f0": data[:, 0], "f1": data[:, 1]})
    for k in range(2, dim):
        frame[f"f{k}"] = rng.uniform(0.0, 1.0, size=len(frame))
    frame["label"] = data[:, 2].astype(int)
    return frame


def _tokens(n: int, rng: np.random.Generator) -> pd.DataFrame:
    texts, labels = [], []
    for i in range(n):
        label = i % 2
        vocab = POSITIVE_WORDS if label == 1 else NEGATIVE_WORDS
        length = int(rng.integers(3, 7))
        words = list(rng.choice(vocab, size=length))
        words += list(rng.choice(FILLER_WORDS, size=int(rng.integers(1, 4))))
        rng.shuffle(words)
        texts.append(" ".join(words))
        labels.append(str(label))
    order = rng.permutation(n)
    return pd.DataFrame({
        "text": [texts[i] for i in order],
        "sentiment": [labels[i] for i in order],
    })


def gen_synthetic(n: int, margin: float = 0.2, seed: int = 42, dim: int = 2,
                  variant: str = "numeric", output: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """
    Generate a balanced two-class dataset.

    Args:
        n: Number of rows (at least 10)
        margin: Distance from the f0 = f1 diagonal, in (0, 0.5)
        seed: Random seed
        dim: 2 or 4 feature columns (numeric variant)
        variant: "numeric" or "tokens"
        output: Optional CSV path to write

    Returns:
        pd.DataFrame: The generated rows

    Raises:
        InvalidArgumentError: On out-of-range arguments
    """
    if n < 10:
        raise InvalidArgumentError(f"n must be at least 10, got {n}", {"n": n})
    if not 0.0 < margin < 0.5:
        raise InvalidArgumentError(f"margin must be in (0, 0.5), got {margin}", {"margin": margin})
    if dim not in (2, 4):
        raise InvalidArgumentError(f"dim must be 2 or 4, got {dim}", {"dim": dim})
    if variant not in ("numeric", "tokens"):
        raise InvalidArgumentError(f"Unknown variant {variant!r}", {"variant": variant})

    rng = np.random.default_rng(seed)
    frame = _numeric(n, margin, rng, dim) if variant == "numeric" else _tokens(n, rng)

    if output is not None:
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(output, index=False, float_format="%.12f")
        logger.info(f"Wrote {len(frame)} synthetic row(s) to {output}")
    return frame
