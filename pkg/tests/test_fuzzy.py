"""
QFuzz Sentiment - Fuzzy Logic Tests
===================================

Memberships, rule activation, defuzzification and the CF baseline.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from qfuzz.errors import (
    CheckpointFormatError,
    EmptyInputError,
    InvalidArgumentError,
    LengthMismatchError,
    QubitIndexError,
    UnknownLabelError,
    ZeroActivationError,
)
from qfuzz.fuzzy import (
    FuzzyOperators,
    FuzzyRule,
    GRID_SETS,
    MembershipFunction,
    WordSentimentTable,
    build_cf_rulebase,
    cf_classify,
    cf_score,
    defuzzify,
    fuzzy_membership_score,
    fuzzy_or,
    grid_rulebase,
    load_rulebase,
    rule_activation,
    save_rulebase,
)
from qfuzz.textprep import FeatureRecord


def constant(value):
    """A triangular set whose membership at x = 0.5 is exactly value."""
    if value == 1.0:
        return MembershipFunction.triangular(0.0, 0.5, 1.0)
    # rises on [a, 1]: (0.5 - a) / (1 - a) = value
    a = (0.5 - value) / (1.0 - value)
    return MembershipFunction.triangular(a, 1.0, 1.0)


class TestMembership:
    """Tests for membership functions."""

    def test_triangular(self):
        mf = MembershipFunction.triangular(0.0, 0.5, 1.0)
        assert mf(0.5) == 1.0
        assert mf(0.25) == pytest.approx(0.5)
        assert mf(0.75) == pytest.approx(0.5)
        assert mf(-0.1) == 0.0
        assert mf(1.0) == 0.0

    def test_gaussian(self):
        mf = MembershipFunction.gaussian(0.3, 0.1)
        assert mf(0.3) == 1.0
        assert mf(0.4) == pytest.approx(np.exp(-0.5))

    def test_bad_triangle(self):
        with pytest.raises(InvalidArgumentError):
            MembershipFunction.triangular(1.0, 0.5, 0.0)

    def test_describe_parse(self):
        mf = MembershipFunction.gaussian(0.25, 0.125)
        assert MembershipFunction.parse(mf.describe()) == mf

    def test_parse_garbage(self):
        with pytest.raises(CheckpointFormatError):
            MembershipFunction.parse("trapezoid:1,2")


class TestRules:
    """Tests for rule activation and defuzzification."""

    def test_activation_is_min(self):
        rule = FuzzyRule(((0, constant(0.3)), (1, constant(0.7))), 1.0)
        assert rule_activation(rule, [0.5, 0.5]) == pytest.approx(0.3)

    def test_single_antecedent_at_peak(self):
        rule = FuzzyRule(((0, MembershipFunction.triangular(0.0, 0.4, 1.0)),), 0.0)
        assert rule_activation(rule, [0.4]) == 1.0

    def test_three_antecedents(self):
        rule = FuzzyRule(((0, constant(0.5)), (1, constant(0.5)), (2, constant(0.2))), 0.0)
        assert rule_activation(rule, [0.5, 0.5, 0.5]) == pytest.approx(0.2)

    def test_product_and(self):
        rule = FuzzyRule(((0, constant(0.5)), (1, constant(0.4))), 0.0)
        assert rule_activation(rule, [0.5, 0.5], and_op="product") == pytest.approx(0.2)

    def test_activation_index_out_of_range(self):
        rule = FuzzyRule(((3, constant(0.5)),), 0.0)
        with pytest.raises(QubitIndexError):
            rule_activation(rule, [0.5, 0.5])

    def test_rule_needs_antecedent(self):
        with pytest.raises(InvalidArgumentError):
            FuzzyRule((), 1.0)

    def test_unknown_operator(self):
        with pytest.raises(UnknownLabelError):
            FuzzyOperators(and_op="lukasiewicz")

    def test_probabilistic_sum(self):
        assert fuzzy_or([0.5, 0.5], "probabilistic_sum") == pytest.approx(0.75)

    @pytest.mark.parametrize("activations,consequents,expected", [
        ([0.5, 0.5], [1, 0], 0.5),
        ([1.0], [0.8], 0.8),
        ([0.2, 0.6, 0.2], [0, 1, 0], 0.6),
    ])
    def test_defuzzify(self, activations, consequents, expected):
        assert defuzzify(activations, consequents) == pytest.approx(expected)

    def test_defuzzify_bounded_by_consequents(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            activations = rng.uniform(0.01, 1, size=5)
            consequents = rng.uniform(-1, 1, size=5)
            value = defuzzify(activations, consequents)
            assert consequents.min() - 1e-12 <= value <= consequents.max() + 1e-12

    def test_defuzzify_no_rule_fired(self):
        with pytest.raises(ZeroActivationError):
            defuzzify([0.0, 0.0], [1.0, 0.0])

    def test_defuzzify_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            defuzzify([0.5], [1.0, 0.0])


class TestMembershipScore:
    """Tests for word-association class memberships."""

    @pytest.fixture
    def table(self):
        return WordSentimentTable({"meh": (0.6, 0.4), "fine": (0.4, 0.6)})

    def test_empty(self, table):
        assert fuzzy_membership_score([], table, 1, []) == 0.0

    def test_single_word(self, table):
        assert fuzzy_membership_score(["meh"], table, 1, [1.0]) == pytest.approx(0.4)

    def test_two_words(self, table):
        assert fuzzy_membership_score(["meh", "fine"], table, 1, [0.5, 0.5]) == pytest.approx(0.5)

    def test_unseen_word(self, table):
        assert fuzzy_membership_score(["zebra"], table, 0, [1.0]) == 0.0

    def test_max_aggregate(self, table):
        assert fuzzy_membership_score(["meh", "fine"], table, 1, [1.0, 1.0], "max") == pytest.approx(0.6)

    def test_length_mismatch(self, table):
        with pytest.raises(LengthMismatchError):
            fuzzy_membership_score(["meh"], table, 0, [0.5, 0.5])

    def test_from_class_counts(self):
        table = WordSentimentTable.from_class_counts({"good": (1, 3), "void": (0, 0)})
        assert table.association("good", 1) == pytest.approx(0.75)
        assert len(table) == 1


class TestClassicalFuzzy:
    """Tests for the grid rulebase baseline."""

    def test_peak_of_positive_rule(self):
        consequents = [0.0] * 9
        consequents[8] = 1.0  # (high, high)
        label, score = cf_classify([1.0, 1.0], grid_rulebase(consequents))
        assert (label, score) == (1, 1.0)

    def test_no_rule_fires(self):
        rules = [FuzzyRule(((0, GRID_SETS["low"]),), 0.0)]
        label, score = cf_classify([0.9, 0.9], rules)
        assert (label, score) == (1, 0.5)

    def test_mirrored_scores(self):
        """Swapping features on a symmetric grid mirrors the score."""
        consequents = [0.5, 0.8, 1.0, 0.2, 0.5, 0.8, 0.0, 0.2, 0.5]
        rules = grid_rulebase(consequents)
        rng = np.random.default_rng(3)
        for x0, x1 in rng.uniform(0, 1, size=(10, 2)):
            s = cf_score([x0, x1], rules)
            assert cf_score([x1, x0], rules) == pytest.approx(1.0 - s, abs=1e-12)

    def test_classify_feature_record(self):
        rules = grid_rulebase([0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
        record = FeatureRecord.from_features([0.1, 1.0], 1)
        assert cf_classify(record, rules)[0] == 1

    def test_build_fraction(self):
        """A point at a cell peak fixes that cell's consequent."""
        rules = build_cf_rulebase([[0.0, 1.0], [1.0, 0.0]], [1, 0])
        assert rules[2].consequent == pytest.approx(1.0)   # (low, high)
        assert rules[6].consequent == pytest.approx(0.0)   # (high, low)
        assert rules[4].consequent == pytest.approx(0.5)   # unreached

    def test_build_majority(self):
        features = [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
        rules = build_cf_rulebase(features, [1, 1, 0], consequent_mode="majority")
        assert rules[2].consequent == 1.0

    def test_build_separates_diagonal(self):
        rng = np.random.default_rng(5)
        points = rng.uniform(0, 1, size=(200, 2))
        labels = (points[:, 1] > points[:, 0]).astype(int)
        rules = build_cf_rulebase(points, labels)
        predictions = [cf_classify(p, rules)[0] for p in points]
        assert np.mean(np.array(predictions) == labels) > 0.75

    def test_build_empty(self):
        with pytest.raises(EmptyInputError):
            build_cf_rulebase([], [])

    def test_empty_rulebase(self):
        with pytest.raises(EmptyInputError):
            cf_score([0.5, 0.5], [])

    def test_rulebase_file(self, tmp_path):
        rules = grid_rulebase([0.1 * k for k in range(9)])
        path = save_rulebase(tmp_path / "rules.txt", rules, FuzzyOperators("product", "max"))
        loaded, operators = load_rulebase(path)
        assert loaded == rules
        assert operators.and_op == "product"

    def test_rulebase_wrong_format(self, tmp_path):
        path = tmp_path / "rules.txt"
        path.write_text("FORMAT=something-else\n")
        with pytest.raises(CheckpointFormatError):
            load_rulebase(path)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
