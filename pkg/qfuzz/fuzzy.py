"""
QFuzz Sentiment - Fuzzy Logic
=============================

Membership functions, rule activation, weighted-average defuzzification,
per-class word associations and the classical fuzzy (CF) baseline.

The CF rulebase is a 3x3 grid of triangular memberships (low / medium /
high per feature). Each cell becomes one rule whose consequent is learned
from the training points that fall in it.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from dotenv import dotenv_values

from .errors import (
    CheckpointFormatError,
    EmptyInputError,
    InvalidArgumentError,
    LengthMismatchError,
    QubitIndexError,
    UnknownLabelError,
    ZeroActivationError,
)

if TYPE_CHECKING:
    from .textprep import FeatureRecord

logger = logging.getLogger(__name__)

RULEBASE_FORMAT = "qfuzz-rulebase/1"


class MembershipShape(str, Enum):
    TRIANGULAR = "triangular"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class MembershipFunction:
    """
    Degree of membership of a crisp value in a fuzzy set.

    triangular(a, b, c): rises on [a, b], peaks at b with value 1, falls on [b, c]
    gaussian(center, width): exp(-(x - center)^2 / (2 width^2))
    """
    shape: MembershipShape
    params: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", MembershipShape(self.shape))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.shape is MembershipShape.TRIANGULAR:
            if len(self.params) != 3:
                raise InvalidArgumentError("triangular membership needs (a, b, c)")
            a, b, c = self.params
            if not a <= b <= c:
                raise InvalidArgumentError(f"triangular membership needs a <= b <= c, got {self.params}")
        else:
            if len(self.params) != 2 or self.params[1] <= 0:
                raise InvalidArgumentError("gaussian membership needs (center, width > 0)")

    @classmethod
    def triangular(cls, a: float, b: float, c: float) -> "MembershipFunction":
        return cls(MembershipShape.TRIANGULAR, (a, b, c))

    @classmethod
    def gaussian(cls, center: float, width: float) -> "MembershipFunction":
        return cls(MembershipShape.GAUSSIAN, (center, width))

    def __call__(self, x: float) -> float:
        x = float(x)
        if self.shape is MembershipShape.GAUSSIAN:
            center, width = self.params
            return math.exp(-((x - center) ** 2) / (2 * width ** 2))
        a, b, c = self.params
        if x == b:
            return 1.0
        if a < x < b:
            return (x - a) / (b - a)
        if b < x < c:
            return (c - x) / (c - b)
        return 0.0

    def describe(self) -> str:
        return f"{self.shape.value}:" + ",".join(repr(p) for p in self.params)

    @classmethod
    def parse(cls, text: str) -> "MembershipFunction":
        shape, _, values = text.partition(":")
        try:
            return cls(MembershipShape(shape), tuple(float(v) for v in values.split(",")))
        except ValueError as e:
            raise CheckpointFormatError(f"Bad membership function {text!r}: {e}") from None


@dataclass(frozen=True)
class FuzzyRule:
    """IF x[i1] is A1 AND x[i2] is A2 ... THEN y = consequent."""
    antecedents: Tuple[Tuple[int, MembershipFunction], ...]
    consequent: float

    def __post_init__(self):
        if len(self.antecedents) < 1:
            raise InvalidArgumentError("A fuzzy rule needs at least one antecedent")
        object.__setattr__(self, "antecedents", tuple((int(i), mf) for i, mf in self.antecedents))


@dataclass(frozen=True)
class FuzzyOperators:
    """Combination operators for AND / OR."""
    and_op: str = "min"
    or_op: str = "max"

    def __post_init__(self):
        if self.and_op not in ("min", "product"):
            raise UnknownLabelError(f"Unknown AND operator: {self.and_op!r}")
        if self.or_op not in ("max", "probabilistic_sum"):
            raise UnknownLabelError(f"Unknown OR operator: {self.or_op!r}")


def fuzzy_and(values: Sequence[float], op: str = "min") -> float:
    if op == "product":
        return float(np.prod(values))
    return float(min(values))


def fuzzy_or(values: Sequence[float], op: str = "max") -> float:
    if op == "probabilistic_sum":
        result = 0.0
        for v in values:
            result = result + v - result * v
        return result
    return float(max(values)) if len(values) else 0.0


def rule_activation(rule: FuzzyRule, inputs: Sequence[float], and_op: str = "min") -> float:
    """Firing strength: AND over the antecedent memberships."""
    memberships = []
    for index, mf in rule.antecedents:
        if not 0 <= index < len(inputs):
            raise QubitIndexError(
                f"Rule input index {index} out of range for {len(inputs)} input(s)",
                {"index": index},
            )
        memberships.append(mf(inputs[index]))
    return fuzzy_and(memberships, and_op)


def defuzzify(activations: Sequence[float], consequents: Sequence[float]) -> float:
    """
    Weighted-average defuzzification.

    Raises:
        ZeroActivationError: If no rule fired
    """
    activations = np.asarray(activations, dtype=float)
    consequents = np.asarray(consequents, dtype=float)
    if activations.size == 0 or activations.shape != consequents.shape:
        raise LengthMismatchError(
            f"activations ({activations.size}) and consequents ({consequents.size}) "
            "must have the same non-zero length"
        )
    total = float(np.sum(activations))
    if total <= 0.0:
        raise ZeroActivationError("No rule fired")
    return float(np.dot(activations, consequents) / total)


# ==========================================
# Word-sentiment associations
# ==========================================

@dataclass(frozen=True)
class WordSentimentTable:
    """
    Per-word class associations F(w, S_i).

    F(w, S_i) is the word's training frequency in class i divided by its
    total training frequency. Unseen words associate with neither class.
    """
    associations: Mapping[str, Tuple[float, float]] = field(default_factory=dict)

    @classmethod
    def from_class_counts(cls, class_freq: Mapping[str, Tuple[int, int]]) -> "WordSentimentTable":
        associations = {}
        for word, (count0, count1) in class_freq.items():
            total = count0 + count1
            if total > 0:
                associations[word] = (count0 / total, count1 / total)
        return cls(associations)

    def association(self, word: str, cls: int) -> float:
        pair = self.associations.get(word)
        return pair[cls] if pair is not None else 0.0

    def __len__(self) -> int:
        return len(self.associations)


AGGREGATES = ("sum", "max", "probabilistic_sum")


def fuzzy_membership_score(words: Sequence[str], table: WordSentimentTable, cls: int,
                           weights: Sequence[float], aggregate: str = "sum") -> float:
    """
    Class membership of an utterance from its word associations.

    "sum" is the weighted sum of F(w_j, S_i) * weight_j. "max" and
    "probabilistic_sum" combine the weighted terms with a fuzzy OR instead.
    """
    if len(words) != len(weights):
        raise LengthMismatchError(
            f"{len(words)} word(s) but {len(weights)} weight(s)",
            {"words": len(words), "weights": len(weights)},
        )
    if cls not in (0, 1):
        raise UnknownLabelError(f"Class must be 0 or 1, got {cls!r}")
    terms = [table.association(w, cls) * float(wt) for w, wt in zip(words, weights)]
    if not terms:
        return 0.0
    if aggregate == "sum":
        return float(sum(terms))
    if aggregate == "max":
        return fuzzy_or(terms, "max")
    if aggregate == "probabilistic_sum":
        return fuzzy_or(terms, "probabilistic_sum")
    raise UnknownLabelError(f"Unknown aggregate: {aggregate!r}")


# ==========================================
# Classical fuzzy baseline
# ==========================================

GRID_SETS = {
    "low": MembershipFunction.triangular(-0.5, 0.0, 0.5),
    "medium": MembershipFunction.triangular(0.0, 0.5, 1.0),
    "high": MembershipFunction.triangular(0.5, 1.0, 1.5),
}
GRID_NAMES = ("low", "medium", "high")


def grid_rulebase(consequents: Sequence[float]) -> List[FuzzyRule]:
    """The 3x3 grid over two features, cell (i, j) at index 3 * i + j."""
    if len(consequents) != 9:
        raise LengthMismatchError(f"Grid rulebase needs 9 consequents, got {len(consequents)}")
    rules = []
    for i, name0 in enumerate(GRID_NAMES):
        for j, name1 in enumerate(GRID_NAMES):
            rules.append(FuzzyRule(
                ((0, GRID_SETS[name0]), (1, GRID_SETS[name1])),
                float(consequents[3 * i + j]),
            ))
    return rules


def build_cf_rulebase(features: Sequence[Sequence[float]], labels: Sequence[int],
                      consequent_mode: str = "fraction") -> List[FuzzyRule]:
    """
    Learn the grid consequents from training points.

    Each point votes for every cell with its rule activation as weight.
    "fraction" keeps the activation-weighted class-1 share, "majority"
    rounds it to 0 or 1. Cells no point reaches get 0.5.
    """
    if consequent_mode not in ("fraction", "majority"):
        raise UnknownLabelError(f"Unknown consequent mode: {consequent_mode!r}")
    if len(features) != len(labels):
        raise LengthMismatchError(f"{len(features)} feature row(s) but {len(labels)} label(s)")
    if len(features) == 0:
        raise EmptyInputError("Cannot build a rulebase from no points", code="empty-dataset")

    template = grid_rulebase([0.5] * 9)
    weight = np.zeros(9)
    positive = np.zeros(9)
    for x, y in zip(features, labels):
        for k, rule in enumerate(template):
            alpha = rule_activation(rule, x)
            weight[k] += alpha
            positive[k] += alpha * y

    consequents = []
    for k in range(9):
        if weight[k] <= 0:
            consequents.append(0.5)
            continue
        share = positive[k] / weight[k]
        if consequent_mode == "majority":
            share = 1.0 if share >= 0.5 else 0.0
        consequents.append(float(share))

    logger.debug(f"CF consequents: {np.round(consequents, 3).tolist()}")
    return grid_rulebase(consequents)


def cf_score(inputs: Sequence[float], rulebase: Sequence[FuzzyRule],
             operators: Optional[FuzzyOperators] = None) -> float:
    """Defuzzified score, 0.5 when no rule fires."""
    operators = operators or FuzzyOperators()
    if not rulebase:
        raise EmptyInputError("Rulebase is empty", code="empty-rulebase")
    activations = [rule_activation(r, inputs, operators.and_op) for r in rulebase]
    try:
        return defuzzify(activations, [r.consequent for r in rulebase])
    except ZeroActivationError:
        return 0.5


def cf_classify(record: Union["FeatureRecord", Sequence[float]], rulebase: Sequence[FuzzyRule],
                operators: Optional[FuzzyOperators] = None) -> Tuple[int, float]:
    """Predicted label (1 iff score >= 0.5) and score for one record."""
    inputs = getattr(record, "features", record)
    score = cf_score(list(inputs)[:2], rulebase, operators)
    return (1 if score >= 0.5 else 0), score


# ==========================================
# Rulebase files
# ==========================================

def save_rulebase(path: Union[str, Path], rulebase: Sequence[FuzzyRule],
                  operators: Optional[FuzzyOperators] = None) -> Path:
    """Write a rulebase as a key=value text file."""
    operators = operators or FuzzyOperators()
    lines = [
        "# qfuzz fuzzy rulebase",
        f"FORMAT={RULEBASE_FORMAT}",
        f"AND_OP={operators.and_op}",
        f"OR_OP={operators.or_op}",
        f"RULE_COUNT={len(rulebase)}",
    ]
    for k, rule in enumerate(rulebase):
        antecedents = ";".join(f"{i}:{mf.describe()}" for i, mf in rule.antecedents)
        lines.append(f"RULE_{k}_ANTECEDENTS={antecedents}")
        lines.append(f"RULE_{k}_CONSEQUENT={rule.consequent!r}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_rulebase(path: Union[str, Path]) -> Tuple[List[FuzzyRule], FuzzyOperators]:
    """Read a rulebase written by save_rulebase."""
    values: Dict[str, Optional[str]] = dotenv_values(path)
    if values.get("FORMAT") != RULEBASE_FORMAT:
        raise CheckpointFormatError(f"{path} is not a {RULEBASE_FORMAT} file")
    try:
        count = int(values["RULE_COUNT"])
        rules = []
        for k in range(count):
            antecedents = []
            for part in values[f"RULE_{k}_ANTECEDENTS"].split(";"):
                index, _, mf = part.partition(":")
                antecedents.append((int(index), MembershipFunction.parse(mf)))
            rules.append(FuzzyRule(tuple(antecedents), float(values[f"RULE_{k}_CONSEQUENT"])))
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointFormatError(f"Malformed rulebase {path}: {e}") from None
    operators = FuzzyOperators(values.get("AND_OP") or "min", values.get("OR_OP") or "max")
    return rules, operators
