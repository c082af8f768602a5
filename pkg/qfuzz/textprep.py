"""
QFuzz Sentiment - Text Preprocessing & Features
===============================================

Turns raw utterances into token lists and token lists into the small
feature vectors the circuits embed.

Pipeline (TextPreprocessor.preprocess):
    lowercase -> expand contractions -> drop URLs / mentions / '#'
    -> keep letters only -> drop stopwords -> stem -> drop stopwords

Features (extract_features):
    f0, f1  TF-IDF weighted class-0 / class-1 word association
    f2      token count
    f3      mean IDF of the tokens
all min/max normalized on the training split.

Example:
    preprocessor = TextPreprocessor()
    preprocessor.preprocess("I can't wait!!")   # ['cannot', 'wait']
"""

import logging
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from nltk.stem.snowball import SnowballStemmer

from .errors import EmptyInputError, InvalidArgumentError, UnknownLabelValueError
from .fuzzy import WordSentimentTable, fuzzy_membership_score

logger = logging.getLogger(__name__)

FEATURE_DIMS = (2, 4)
NEGATIONS: FrozenSet[str] = frozenset({"not", "no", "never", "nor"})

STOPWORDS: FrozenSet[str] = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by could did do does doing down during each
few for from further had has have having he her here hers herself him himself his
how i if in into is it its itself just me more most my myself no nor not now of
off on once only or other our ours ourselves out over own same she should so some
such than that the their theirs them themselves then there these they this those
through to too under until up very was we were what when where which while who
whom why will with would you your yours yourself yourselves also can ever may
might must shall us let get got
""".split())

# Order matters: whole-word forms before the generic suffixes
CONTRACTIONS: Tuple[Tuple[str, str], ...] = (
    (r"\bcan't\b", "cannot"),
    (r"\bwon't\b", "will not"),
    (r"\bshan't\b", "shall not"),
    (r"\bain't\b", "is not"),
    (r"n't\b", " not"),
    (r"'re\b", " are"),
    (r"'s\b", " is"),
    (r"'m\b", " am"),
    (r"'ll\b", " will"),
    (r"'ve\b", " have"),
    (r"'d\b", " would"),
)

_URL = re.compile(r"(https?://\S+|www\.\S+)")
_MENTION = re.compile(r"@\w+")
_NON_ALPHA = re.compile(r"[^a-z]+")


class TextPreprocessor:
    """
    Deterministic cleaning, stopword removal and stemming.

    Stemming runs to a fixed point and stopwords are removed again after
    it, so preprocessing a joined token list returns the same tokens.
    """

    def __init__(self, keep_negations: bool = True, extra_stopwords: Sequence[str] = ()):
        self.keep_negations = keep_negations
        stopwords = set(STOPWORDS) | set(extra_stopwords)
        if keep_negations:
            stopwords -= NEGATIONS
        else:
            stopwords |= NEGATIONS
        self.stopwords: FrozenSet[str] = frozenset(stopwords)
        self._contractions = [(re.compile(p), r) for p, r in CONTRACTIONS]
        self._stemmer = SnowballStemmer("english")
        self._stem_cache: Dict[str, str] = {}

    def clean(self, text: str) -> str:
        text = text.lower().replace("’", "'")
        for pattern, replacement in self._contractions:
            text = pattern.sub(replacement, text)
        text = _URL.sub(" ", text)
        text = _MENTION.sub(" ", text)
        text = text.replace("#", " ")
        return _NON_ALPHA.sub(" ", text)

    def stem(self, word: str) -> str:
        cached = self._stem_cache.get(word)
        if cached is not None:
            return cached
        current = word
        while True:
            stemmed = self._stemmer.stem(current)
            if stemmed == current:
                break
            current = stemmed
        self._stem_cache[word] = current
        return current

    def _filter(self, words: Sequence[str]) -> List[str]:
        return [w for w in words if len(w) > 1 and w not in self.stopwords]

    def preprocess(self, raw: Union["RawRecord", str]) -> List[str]:
        """
        Clean one utterance into stemmed tokens, order preserved.

        Raises:
            EmptyInputError: If nothing survives cleaning
        """
        text = raw.text if isinstance(raw, RawRecord) else raw
        if not text or not text.strip():
            raise EmptyInputError("Text is empty", code="empty-text")
        words = self._filter(self.clean(text).split())
        tokens = self._filter([self.stem(w) for w in words])
        if not tokens:
            raise EmptyInputError(
                "Text is empty after cleaning", code="empty-after-cleaning", details={"text": text[:80]}
            )
        return tokens


_default_preprocessor: Optional[TextPreprocessor] = None


def preprocess(raw: Union["RawRecord", str], keep_negations: bool = True) -> List[str]:
    """Convenience wrapper around a shared TextPreprocessor."""
    global _default_preprocessor
    if not keep_negations:
        return TextPreprocessor(keep_negations=False).preprocess(raw)
    if _default_preprocessor is None:
        _default_preprocessor = TextPreprocessor()
    return _default_preprocessor.preprocess(raw)


# ==========================================
# Records
# ==========================================

@dataclass(frozen=True)
class RawRecord:
    """One input row: utterance text and its source label."""
    text: str
    label: str

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise EmptyInputError("RawRecord text must be non-empty", code="empty-text")


@dataclass(frozen=True)
class FeatureRecord:
    """
    A preprocessed utterance ready for the models.

    Attributes:
        tokens: Stemmed lowercase tokens
        tfidf: TF-IDF weight per distinct token
        features: Normalized features in [0, 1]
        angles: pi * clamp(features, 0, 1)
        label: 0 or 1
    """
    tokens: Tuple[str, ...]
    tfidf: Mapping[str, float]
    features: np.ndarray
    angles: np.ndarray
    label: int

    @classmethod
    def from_features(cls, features: Sequence[float], label: int,
                      tokens: Sequence[str] = (), tfidf: Optional[Mapping[str, float]] = None) -> "FeatureRecord":
        vector = np.clip(np.asarray(features, dtype=float), 0.0, 1.0)
        if int(label) not in (0, 1):
            raise UnknownLabelValueError(f"Label must be 0 or 1, got {label!r}")
        return cls(tuple(tokens), dict(tfidf or {}), vector, angle_scale(vector), int(label))


def angle_scale(features: Sequence[float]) -> np.ndarray:
    """Map normalized features onto [0, pi]."""
    return math.pi * np.clip(np.asarray(features, dtype=float), 0.0, 1.0)


# ==========================================
# Corpus statistics
# ==========================================

@dataclass(frozen=True)
class CorpusStats:
    """
    Vocabulary statistics of the training split.

    Build with CorpusStats.fit on training rows only; the checkpoint
    loader is the only other producer.
    """
    doc_count: int
    doc_freq: Mapping[str, int]
    class_freq: Mapping[str, Tuple[int, int]]
    feature_min: Tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    feature_max: Tuple[float, ...] = (1.0, 1.0, 1.0, 1.0)
    aggregate: str = "sum"
    table: WordSentimentTable = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.table is None:
            object.__setattr__(self, "table", WordSentimentTable.from_class_counts(self.class_freq))

    @classmethod
    def fit(cls, token_lists: Sequence[Sequence[str]], labels: Sequence[int],
            aggregate: str = "sum") -> "CorpusStats":
        """Count document and class frequencies, then fix the normalization range."""
        if len(token_lists) == 0:
            raise EmptyInputError("Cannot fit corpus statistics on no documents", code="empty-dataset")
        if len(token_lists) != len(labels):
            raise InvalidArgumentError("token_lists and labels differ in length")

        doc_freq: Dict[str, int] = {}
        class_freq: Dict[str, List[int]] = {}
        for tokens, label in zip(token_lists, labels):
            for token in set(tokens):
                doc_freq[token] = doc_freq.get(token, 0) + 1
            for token in tokens:
                class_freq.setdefault(token, [0, 0])[int(label)] += 1

        stats = cls(
            doc_count=len(token_lists),
            doc_freq=doc_freq,
            class_freq={t: (c[0], c[1]) for t, c in class_freq.items()},
            aggregate=aggregate,
        )
        raw = np.array([raw_features(tokens, stats) for tokens in token_lists])
        stats = replace(
            stats,
            feature_min=tuple(float(v) for v in raw.min(axis=0)),
            feature_max=tuple(float(v) for v in raw.max(axis=0)),
            table=stats.table,
        )
        logger.info(f"Corpus statistics: {stats.doc_count} document(s), {len(doc_freq)} token type(s)")
        return stats


def term_frequency(token: str, tokens: Sequence[str]) -> float:
    """count(token) / len(tokens)."""
    if len(tokens) == 0:
        raise EmptyInputError("Term frequency of an empty token list", code="empty-token-list")
    return sum(1 for t in tokens if t == token) / len(tokens)


def inverse_document_frequency(token: str, stats: CorpusStats) -> float:
    """ln(N / (1 + df)), clamped below at 0."""
    if stats.doc_count < 1:
        raise EmptyInputError("Corpus has no documents", code="empty-dataset")
    value = math.log(stats.doc_count / (1 + stats.doc_freq.get(token, 0)))
    return max(value, 0.0)


def tfidf_weights(tokens: Sequence[str], stats: CorpusStats) -> Dict[str, float]:
    """TF-IDF per distinct token, in first-occurrence order."""
    if not tokens:
        return {}
    counts: Dict[str, int] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0) + 1
    n = len(tokens)
    return {t: (c / n) * inverse_document_frequency(t, stats) for t, c in counts.items()}


def raw_features(tokens: Sequence[str], stats: CorpusStats) -> np.ndarray:
    """Unnormalized [class-0 assoc, class-1 assoc, token count, mean IDF]."""
    if not tokens:
        return np.zeros(4)
    tfidf = tfidf_weights(tokens, stats)
    words = list(tfidf)
    total = sum(tfidf.values())
    if total > 0:
        weights = [tfidf[w] / total for w in words]
    else:
        weights = [1.0 / len(words)] * len(words)
    assoc0 = fuzzy_membership_score(words, stats.table, 0, weights, stats.aggregate)
    assoc1 = fuzzy_membership_score(words, stats.table, 1, weights, stats.aggregate)
    mean_idf = float(np.mean([inverse_document_frequency(t, stats) for t in tokens]))
    return np.array([assoc0, assoc1, float(len(tokens)), mean_idf])


def extract_features(tokens: Sequence[str], stats: CorpusStats, dim: int = 2) -> np.ndarray:
    """Min/max-normalized features, clamped to [0, 1]."""
    if dim not in FEATURE_DIMS:
        raise InvalidArgumentError(f"Feature dimension must be 2 or 4, got {dim}")
    if not tokens:
        return np.zeros(dim)
    raw = raw_features(tokens, stats)
    low = np.asarray(stats.feature_min)
    span = np.asarray(stats.feature_max) - low
    normalized = np.where(span > 0, (raw - low) / np.where(span > 0, span, 1.0), 0.0)
    return np.clip(normalized, 0.0, 1.0)[:dim]


def build_feature_record(tokens: Sequence[str], label: int, stats: CorpusStats, dim: int = 2) -> FeatureRecord:
    return FeatureRecord.from_features(
        extract_features(tokens, stats, dim), label, tokens, tfidf_weights(tokens, stats)
    )


# ==========================================
# Labels
# ==========================================

class LabelScheme(str, Enum):
    """Source-label conventions."""
    CVTD = "CVTD"
    GSTD = "GSTD"
    GENERIC = "generic"

    @classmethod
    def parse(cls, value: Union[str, "LabelScheme"]) -> "LabelScheme":
        """Case-insensitive lookup that reports unknown schemes as invalid arguments."""
        if isinstance(value, cls):
            return value
        wanted = str(value).strip().lower()
        for scheme in cls:
            if scheme.value.lower() == wanted:
                return scheme
        raise InvalidArgumentError(
            f"Unknown label scheme {value!r}",
            {"scheme": str(value), "allowed": [s.value for s in cls]},
        )


_CVTD = {
    "extremely negative": 0,
    "negative": 0,
    "positive": 1,
    "extremely positive": 1,
    "neutral": None,
}
_GSTD = {
    "negative": 0,
    "positive": 1,
    "neutral": None,
    "-1": 0,
    "1": 1,
    "0": None,
}


def binarize_label(source: str, scheme: Union[str, LabelScheme]) -> Optional[int]:
    """
    Map a source label to 0 / 1, or None when the row is dropped.

    Raises:
        InvalidArgumentError: If the scheme is unknown
        UnknownLabelValueError: If the label is not part of the scheme
    """
    scheme = LabelScheme.parse(scheme)
    key = str(source).strip()
    if scheme is LabelScheme.GENERIC:
        table = {"0": 0, "1": 1}
    elif scheme is LabelScheme.CVTD:
        table = _CVTD
        key = key.lower()
    else:
        table = _GSTD
        key = key.lower()
        if key.endswith(".0"):
            key = key[:-2]
    if key not in table:
        raise UnknownLabelValueError(
            f"Label {source!r} is not valid for scheme {scheme.value}",
            {"label": str(source), "scheme": scheme.value},
        )
    return table[key]
