"""
QFuzz Sentiment - Training Tests
================================

Losses, circuit gradients, ADAM and the training loop.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from qfuzz.errors import EmptyInputError, LengthMismatchError, NonBinaryLabelError
from qfuzz.models import QfnnCircuitSpec, build_hybrid_circuit, build_model
from qfuzz.optim import (
    AdamState,
    TrainConfig,
    accuracy,
    adam_step,
    circuit_gradients,
    cross_entropy_loss,
    finite_difference_grad,
    mse_loss,
    parameter_shift_grad,
    train,
)
from qfuzz.qsim import StateVector, apply_gate, expectation_z, make_rotation
from qfuzz.simulators import (
    CircuitObservable,
    CircuitSimulator,
    DensityMatrixSimulator,
    StatevectorSimulator,
)
from qfuzz.channels import make_channel
from qfuzz.synthetic import gen_synthetic
from qfuzz.textprep import FeatureRecord


def rx_expectation(params):
    state = apply_gate(StateVector.zero(1), make_rotation("x", params[0]), (0,))
    return expectation_z(state, 0)


def synthetic_records(n=40, seed=0):
    frame = gen_synthetic(n, 0.2, seed)
    return [FeatureRecord.from_features([row.f0, row.f1], int(row.label)) for row in frame.itertuples()]


class TestLosses:
    """Tests for loss functions."""

    @pytest.mark.parametrize("predictions,targets,expected", [
        ([1, 0], [1, 0], 0.0),
        ([0.5], [1], 0.25),
        ([0.8, 0.2, 0.6], [1, 0, 1], 0.08),
    ])
    def test_mse(self, predictions, targets, expected):
        assert mse_loss(predictions, targets) == pytest.approx(expected)

    def test_mse_positive_unless_equal(self):
        assert mse_loss([0.3, 0.7], [0.3, 0.7]) == 0.0
        assert mse_loss([0.3, 0.7], [0.3, 0.70001]) > 0.0

    def test_mse_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            mse_loss([0.1, 0.2], [1])

    def test_mse_empty(self):
        with pytest.raises(LengthMismatchError):
            mse_loss([], [])

    def test_cross_entropy_clipped(self):
        assert math.isfinite(cross_entropy_loss([0.0, 1.0], [1, 0]))
        assert cross_entropy_loss([0.5], [1]) == pytest.approx(math.log(2))


class TestGradients:
    """Tests for parameter-shift and finite-difference gradients."""

    def test_shift_rule_on_rx(self):
        assert parameter_shift_grad(rx_expectation, [math.pi / 2], 0) == pytest.approx(-1.0, abs=1e-12)
        assert parameter_shift_grad(rx_expectation, [0.0], 0) == pytest.approx(0.0, abs=1e-12)

    def test_finite_difference_on_rx(self):
        assert finite_difference_grad(rx_expectation, [math.pi / 2], 0) == pytest.approx(-1.0, abs=1e-8)

    def test_shift_matches_finite_difference_on_qfnn(self):
        """Shared fuzzy parameters are shifted per occurrence."""
        circuit = QfnnCircuitSpec().circuit()
        rng = np.random.default_rng(0)
        for _ in range(100):
            params = rng.uniform(0, 2 * math.pi, size=8)
            inputs = rng.uniform(0, math.pi, size=2)
            observable = CircuitObservable(circuit, inputs, StatevectorSimulator())
            for k in range(8):
                shift = parameter_shift_grad(observable, params, k)
                fd = finite_difference_grad(lambda p: observable(p), params, k)
                assert shift == pytest.approx(fd, abs=1e-6)

    def test_circuit_gradients_modes_agree(self):
        circuit = QfnnCircuitSpec(layer2_extra_ry=True).circuit()
        params = np.linspace(0.3, 2.4, 8)
        inputs = np.array([0.9, 1.7])
        simulator = StatevectorSimulator()
        values, d_shift, di_shift = circuit_gradients(circuit, simulator, params, inputs, want_inputs=True)
        _, d_fd, di_fd = circuit_gradients(circuit, simulator, params, inputs, want_inputs=True,
                                           mode="finite_difference")
        np.testing.assert_allclose(values, simulator.expectations(circuit, params, inputs))
        np.testing.assert_allclose(d_shift, d_fd, atol=1e-7)
        np.testing.assert_allclose(di_shift, di_fd, atol=1e-7)

    @pytest.mark.parametrize("circuit", [
        QfnnCircuitSpec().circuit(),
        QfnnCircuitSpec(fuzzy_block_count=0).circuit(),
        build_hybrid_circuit(),
    ], ids=["qfnn", "qnn", "hybrid"])
    def test_batched_shifts_match_single_evaluations(self, circuit):
        rng = np.random.default_rng(4)
        params = rng.uniform(0, 2 * math.pi, size=circuit.n_params)
        inputs = rng.uniform(0, math.pi, size=circuit.n_inputs)
        simulator = StatevectorSimulator()
        indices = [i for i, op in enumerate(circuit.operations) if op.is_rotation]
        batched = simulator.shifted_expectations(circuit, params, inputs, indices, math.pi / 2)
        single = CircuitSimulator.shifted_expectations(simulator, circuit, params, inputs, indices, math.pi / 2)
        assert batched.shape == (len(indices), 2, circuit.n_qubits)
        np.testing.assert_allclose(batched, single, atol=1e-12)

    def test_shifted_bind_leaves_cached_binding_intact(self):
        circuit = QfnnCircuitSpec().circuit()
        params = np.linspace(0.2, 1.6, 8)
        inputs = np.array([0.5, 1.1])
        plain = circuit.bind(params, inputs)
        index = circuit.occurrences(0)[0]
        shifted = circuit.bind(params, inputs, {index: math.pi / 2})
        again = circuit.bind(params, inputs)
        assert not np.allclose(shifted[index][1].matrix, plain[index][1].matrix)
        for (_, before), (_, after) in zip(plain, again):
            np.testing.assert_array_equal(before.matrix, after.matrix)
        other = circuit.bind(params + 0.1, inputs)
        assert not np.allclose(other[index][1].matrix, plain[index][1].matrix)

    def test_shift_rule_under_noise(self):
        """The shift rule stays exact for Kraus channels that do not depend on the parameters."""
        circuit = QfnnCircuitSpec().circuit()
        simulator = DensityMatrixSimulator(make_channel("AD", 0.3))
        params = np.linspace(0.1, 1.5, 8)
        inputs = np.array([0.4, 2.0])
        _, d_shift, _ = circuit_gradients(circuit, simulator, params, inputs)
        _, d_fd, _ = circuit_gradients(circuit, simulator, params, inputs, mode="finite_difference")
        np.testing.assert_allclose(d_shift, d_fd, atol=1e-7)


class TestAdam:
    """Tests for the ADAM update."""

    def test_zero_gradient(self):
        state = AdamState.zeros(3, lr=0.1)
        params = np.array([0.1, 0.2, 0.3])
        _, new_params = adam_step(state, params, np.zeros(3))
        np.testing.assert_array_equal(new_params, params)

    def test_first_step(self):
        state, params = adam_step(AdamState.zeros(1, lr=0.1), np.array([1.0]), np.array([1.0]))
        assert params[0] == pytest.approx(1.0 - 0.1 / (1 + 1e-8), abs=1e-12)
        assert state.step == 1

    def test_inputs_untouched(self):
        state = AdamState.zeros(2)
        params = np.array([0.5, 0.5])
        adam_step(state, params, np.array([1.0, -1.0]))
        np.testing.assert_array_equal(params, [0.5, 0.5])
        np.testing.assert_array_equal(state.m, [0.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(LengthMismatchError):
            adam_step(AdamState.zeros(2), np.zeros(3), np.zeros(3))


class TestTrain:
    """Tests for the mini-batch training loop."""

    def test_history_length(self):
        result = train(build_model("ann"), synthetic_records(), TrainConfig(epochs=3, batch_size=8))
        assert [h.epoch for h in result.history] == [1, 2, 3]

    def test_zero_learning_rate(self):
        """lr = 0 keeps the initial parameters and a flat loss curve."""
        model = build_model("qfnn")
        records = synthetic_records(20)
        cfg = TrainConfig(epochs=3, batch_size=8, lr=0.0, seed=5)
        result = train(model, records, cfg)
        np.testing.assert_array_equal(result.params, model.init_params(np.random.default_rng(5)))
        losses = [h.loss for h in result.history]
        np.testing.assert_allclose(losses, losses[0], rtol=1e-12)

    def test_deterministic(self):
        records = synthetic_records(30)
        cfg = TrainConfig(epochs=2, batch_size=7, seed=11)
        first = train(build_model("qfnn"), records, cfg)
        second = train(build_model("qfnn"), records, cfg)
        np.testing.assert_array_equal(first.params, second.params)
        assert [h.loss for h in first.history] == [h.loss for h in second.history]

    def test_workers_do_not_change_results(self):
        records = synthetic_records(24)
        serial = train(build_model("qfnn"), records, TrainConfig(epochs=2, batch_size=6, workers=1))
        parallel = train(build_model("qfnn"), records, TrainConfig(epochs=2, batch_size=6, workers=4))
        np.testing.assert_array_equal(serial.params, parallel.params)

    def test_ann_learns_separable_data(self):
        records = synthetic_records(200)
        result = train(build_model("ann"), records, TrainConfig(epochs=50, batch_size=16, lr=0.05))
        assert result.history[-1].train_acc >= 0.9

    def test_test_accuracy_recorded(self):
        records = synthetic_records(40)
        result = train(build_model("ann"), records[:30], TrainConfig(epochs=1), test_set=records[30:])
        assert 0.0 <= result.history[0].test_acc <= 1.0

    def test_cf_is_fitted(self):
        """The CF baseline is fitted once and repeats its row per epoch."""
        result = train(build_model("cf"), synthetic_records(60), TrainConfig(epochs=4))
        assert result.params.shape == (9,)
        assert len({(h.loss, h.train_acc) for h in result.history}) == 1
        assert result.history[0].train_acc > 0.8

    def test_on_epoch_callback(self):
        seen = []
        train(build_model("ann"), synthetic_records(), TrainConfig(epochs=2), on_epoch=seen.append)
        assert [r.epoch for r in seen] == [1, 2]

    def test_empty_dataset(self):
        with pytest.raises(EmptyInputError):
            train(build_model("ann"), [])

    def test_non_binary_labels(self):
        record = FeatureRecord(("x",), {}, np.array([0.1, 0.2]), np.array([0.3, 0.6]), 3)
        with pytest.raises(NonBinaryLabelError):
            train(build_model("ann"), [record])

    def test_accuracy_tie_rule(self):
        assert accuracy([0.5, 0.49], [1, 0]) == 1.0

    def test_config_rejects_negative_lr(self):
        with pytest.raises(ValueError):
            TrainConfig(lr=-0.1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
