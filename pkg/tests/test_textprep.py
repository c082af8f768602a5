"""
QFuzz Sentiment - Text Preprocessing Tests
==========================================

Cleaning, TF-IDF, feature extraction and label mapping.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from qfuzz.errors import EmptyInputError, InvalidArgumentError, UnknownLabelValueError
from qfuzz.textprep import (
    CorpusStats,
    FeatureRecord,
    LabelScheme,
    RawRecord,
    TextPreprocessor,
    angle_scale,
    binarize_label,
    build_feature_record,
    extract_features,
    inverse_document_frequency,
    preprocess,
    term_frequency,
    tfidf_weights,
)

SENTENCES = [
    "I do not like this",
    "What a wonderful morning, the coffee is GREAT!!!",
    "Prices keep rising at the supermarket and people are panicking",
    "can't wait to see the new stores opening downtown",
    "@grocer your shelves were empty again #covid https://example.com/x",
]


@pytest.fixture
def corpus():
    token_lists = [["good", "great"], ["bad", "awful"], ["good"], ["bad"]]
    return CorpusStats.fit(token_lists, [1, 0, 1, 0])


class TestPreprocess:
    """Tests for cleaning and tokenization."""

    def test_negation_kept_by_default(self):
        assert preprocess("I do not like this") == ["not", "like"]

    def test_negation_dropped(self):
        assert preprocess("I do not like this", keep_negations=False) == ["like"]

    def test_stopwords_and_punctuation(self):
        assert preprocess("THIS IS A TEST!!!") == ["test"]

    def test_contraction(self):
        assert preprocess("can't wait") == ["cannot", "wait"]

    def test_raw_record(self):
        assert preprocess(RawRecord("THIS IS A TEST!!!", "1")) == ["test"]

    def test_urls_and_mentions_removed(self):
        tokens = preprocess("@grocer check https://example.com/deal #bargain")
        assert "grocer" not in tokens
        assert not any(t.startswith("http") or t == "com" for t in tokens)
        assert tokens[0] == "check"

    @pytest.mark.parametrize("text", SENTENCES)
    def test_idempotent(self, text):
        """Preprocessing the joined tokens returns the same tokens."""
        tokens = preprocess(text)
        assert preprocess(" ".join(tokens)) == tokens

    @pytest.mark.parametrize("text", SENTENCES)
    def test_tokens_are_clean(self, text):
        for token in preprocess(text):
            assert token.isalpha() and token == token.lower()

    def test_empty_after_cleaning(self):
        with pytest.raises(EmptyInputError) as e:
            preprocess("!!! ??? ...")
        assert e.value.code == "empty-after-cleaning"

    def test_blank_text(self):
        with pytest.raises(EmptyInputError) as e:
            preprocess("   ")
        assert e.value.code == "empty-text"

    def test_extra_stopwords(self):
        preprocessor = TextPreprocessor(extra_stopwords=["coffee"])
        assert "coffee" not in preprocessor.preprocess("coffee tastes great")


class TestTfIdf:
    """Tests for term frequency and inverse document frequency."""

    def test_term_frequency(self):
        tokens = ["a", "a"] + [f"w{i}" for i in range(8)]
        assert term_frequency("a", tokens) == pytest.approx(0.2)
        assert term_frequency("zzz", tokens) == 0.0
        assert term_frequency("solo", ["solo"]) == 1.0

    def test_term_frequency_empty(self):
        with pytest.raises(EmptyInputError):
            term_frequency("a", [])

    def test_idf_smoothing(self):
        stats = CorpusStats(doc_count=4, doc_freq={"rare": 1, "everywhere": 4}, class_freq={})
        assert inverse_document_frequency("rare", stats) == pytest.approx(math.log(2))
        assert inverse_document_frequency("everywhere", stats) == 0.0

    def test_idf_unseen(self):
        stats = CorpusStats(doc_count=9, doc_freq={}, class_freq={})
        assert inverse_document_frequency("unseen", stats) == pytest.approx(math.log(9))

    def test_tfidf_weights(self):
        stats = CorpusStats(doc_count=4, doc_freq={"rare": 1}, class_freq={})
        weights = tfidf_weights(["rare", "rare", "other", "rare"], stats)
        assert list(weights) == ["rare", "other"]
        assert weights["rare"] == pytest.approx(0.75 * math.log(2))
        assert weights["other"] == pytest.approx(0.25 * math.log(4))


class TestCorpusStats:
    """Tests for corpus statistics and features."""

    def test_fit_counts(self, corpus):
        assert corpus.doc_count == 4
        assert corpus.doc_freq["good"] == 2
        assert corpus.class_freq["good"] == (0, 2)
        assert corpus.class_freq["awful"] == (1, 0)

    def test_doc_freq_counts_documents(self):
        stats = CorpusStats.fit([["x", "x", "y"], ["x"]], [0, 1])
        assert stats.doc_freq["x"] == 2
        assert stats.class_freq["x"] == (2, 1)

    def test_fit_empty(self):
        with pytest.raises(EmptyInputError):
            CorpusStats.fit([], [])

    def test_positive_document(self, corpus):
        features = extract_features(["good", "great"], corpus)
        assert features[1] > features[0]

    def test_negative_document(self, corpus):
        features = extract_features(["bad", "awful"], corpus)
        assert features[0] > features[1]

    def test_empty_tokens(self, corpus):
        np.testing.assert_array_equal(extract_features([], corpus, dim=4), np.zeros(4))

    def test_features_in_unit_range(self, corpus):
        for tokens in (["good", "bad", "unknown"], ["great"] * 7, ["never", "seen"]):
            features = extract_features(tokens, corpus, dim=4)
            assert features.shape == (4,)
            assert np.all((features >= 0) & (features <= 1))

    def test_bad_dimension(self, corpus):
        with pytest.raises(InvalidArgumentError):
            extract_features(["good"], corpus, dim=3)

    def test_build_feature_record(self, corpus):
        record = build_feature_record(["good", "great"], 1, corpus)
        assert record.tokens == ("good", "great")
        assert set(record.tfidf) == {"good", "great"}
        np.testing.assert_allclose(record.angles, math.pi * record.features)


class TestRecords:
    """Tests for feature records and angle mapping."""

    def test_features_clamped(self):
        record = FeatureRecord.from_features([-0.5, 1.5], 0)
        np.testing.assert_array_equal(record.features, [0.0, 1.0])
        np.testing.assert_allclose(record.angles, [0.0, math.pi])

    def test_bad_label(self):
        with pytest.raises(UnknownLabelValueError):
            FeatureRecord.from_features([0.1, 0.2], 2)

    def test_angle_scale_monotone(self):
        angles = angle_scale(np.linspace(0, 1, 11))
        assert np.all(np.diff(angles) > 0)
        assert angles[0] == 0.0 and angles[-1] == pytest.approx(math.pi)

    def test_raw_record_needs_text(self):
        with pytest.raises(EmptyInputError):
            RawRecord("  ", "1")


class TestLabels:
    """Tests for label binarization."""

    @pytest.mark.parametrize("source,scheme,expected", [
        ("Extremely Negative", "CVTD", 0),
        ("Negative", "CVTD", 0),
        ("Positive", "CVTD", 1),
        ("extremely positive", "CVTD", 1),
        ("Neutral", "CVTD", None),
        ("1", "generic", 1),
        ("0", "generic", 0),
        ("-1", "GSTD", 0),
        ("1.0", "GSTD", 1),
        ("0", "GSTD", None),
        ("positive", "GSTD", 1),
    ])
    def test_binarize(self, source, scheme, expected):
        assert binarize_label(source, scheme) == expected

    def test_unknown_value(self):
        with pytest.raises(UnknownLabelValueError):
            binarize_label("Mixed", "CVTD")

    def test_generic_rejects_words(self):
        with pytest.raises(UnknownLabelValueError):
            binarize_label("positive", "generic")

    def test_scheme_lookup_ignores_case(self):
        assert LabelScheme.parse("cvtd") is LabelScheme.CVTD
        assert LabelScheme.parse(LabelScheme.GSTD) is LabelScheme.GSTD
        assert binarize_label("Positive", "gstd") == 1

    def test_unknown_scheme(self):
        with pytest.raises(InvalidArgumentError) as excinfo:
            binarize_label("1", "IMDB")
        assert excinfo.value.to_dict()["error"] == "invalid-args"
        assert "CVTD" in excinfo.value.details["allowed"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
