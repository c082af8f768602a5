"""
QFuzz Sentiment - Harness Tests
===============================

Configuration, data preparation, run directories, noise sweeps, the CLI
and the metrics recompute script.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent))

from qfuzz.channels import ChannelLabel, PlacementMode
from qfuzz.cli import main
from qfuzz.errors import (
    DatasetIOError,
    InvalidArgumentError,
    SchemaMismatchError,
    SingleClassError,
    UnsupportedModelError,
)
from qfuzz.harness import (
    METRICS_FORMAT,
    ExperimentConfig,
    NoiseConfig,
    evaluate_checkpoint,
    preprocess_dataset,
    prepare_data,
    run_experiment,
    run_noise_sweep,
    split_indices,
)
from qfuzz.optim import TrainConfig
from qfuzz.synthetic import gen_synthetic
from scripts.recompute_metrics import compare

RUN_FILES = ("config.json", "metrics.json", "history.csv", "predictions.csv", "roc.csv",
             "params.txt", "timing.json")


@pytest.fixture
def tweets_csv(tmp_path):
    path = tmp_path / "tweets.csv"
    gen_synthetic(120, seed=3, variant="tokens", output=path)
    return path


def last_json(text):
    return json.loads(text.strip().splitlines()[-1])


def small_config(tmp_path, name="run", **kwargs):
    kwargs.setdefault("synthetic_n", 40)
    train = kwargs.pop("train", TrainConfig(epochs=2, batch_size=8))
    return ExperimentConfig(output_dir=str(tmp_path / name), train=train, **kwargs)


class TestSplit:
    """Tests for the seeded train/test split."""

    def test_disjoint_and_complete(self):
        train_idx, test_idx = split_indices(10, 0.3, 1, 1000, 1000)
        assert len(test_idx) == 3
        assert len(train_idx) == 7
        assert set(train_idx).isdisjoint(test_idx)
        assert sorted(set(train_idx) | set(test_idx)) == list(range(10))

    def test_caps(self):
        train_idx, test_idx = split_indices(100, 0.5, 0, 20, 10)
        assert (len(train_idx), len(test_idx)) == (20, 10)
        assert set(train_idx).isdisjoint(test_idx)

    def test_seeded(self):
        first = split_indices(50, 0.2, 7, 1000, 1000)
        second = split_indices(50, 0.2, 7, 1000, 1000)
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first[1], second[1])


class TestExperimentConfig:
    """Tests for configuration validation and layering."""

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.model == "qfnn"
        assert cfg.test_fraction == 0.5
        assert cfg.noise is None

    def test_rejects_unlisted_fraction(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(test_fraction=0.25)

    def test_any_fraction_when_allowed(self):
        assert ExperimentConfig(test_fraction=0.25, allow_any_fraction=True).test_fraction == 0.25

    def test_text_scheme_needs_dataset(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(scheme="CVTD")

    def test_noise_grid_range(self):
        with pytest.raises(ValidationError):
            NoiseConfig(grid=[0.1, 1.2])

    def test_from_flat(self):
        cfg = ExperimentConfig.from_flat({
            "MODEL": "ann", "EPOCHS": "3", "LR": "0.1", "SEED": "7",
            "NOISE_CHANNELS": "DP,AD", "NOISE_GRID": "0.0,0.5", "NOISE_QUBITS": "0",
        })
        assert cfg.model == "ann"
        assert cfg.train.epochs == 3
        assert cfg.train.lr == 0.1
        assert cfg.seed == 7
        assert cfg.train.seed == 7
        assert cfg.noise.channels == [ChannelLabel.DP, ChannelLabel.AD]
        assert cfg.noise.grid == [0.0, 0.5]
        assert cfg.noise.qubits == [0]

    def test_from_flat_invalid(self):
        with pytest.raises(InvalidArgumentError) as excinfo:
            ExperimentConfig.from_flat({"test_fraction": "0.25"})
        assert excinfo.value.code == "invalid-args"

    def test_from_file_layers(self, tmp_path):
        path = tmp_path / "experiment.env"
        path.write_text("MODEL=cf\nEPOCHS=2\n", encoding="utf-8")
        cfg = ExperimentConfig.from_file(path, overrides={"epochs": 5}, defaults={"seed": 3, "model": "qnn"})
        assert cfg.model == "cf"
        assert cfg.train.epochs == 5
        assert cfg.seed == 3

    def test_from_file_missing(self, tmp_path):
        with pytest.raises(DatasetIOError):
            ExperimentConfig.from_file(tmp_path / "missing.env")


class TestPrepareData:
    """Tests for ingestion and featurization."""

    def test_synthetic_in_memory(self):
        cfg = ExperimentConfig(synthetic_n=40)
        data = prepare_data(cfg, 2)
        assert (len(data.train), len(data.test)) == (20, 20)
        assert all(0.0 <= v <= 1.0 for r in data.train for v in r.features)

    def test_numeric_csv(self, tmp_path):
        path = tmp_path / "numeric.csv"
        gen_synthetic(60, output=path)
        data = prepare_data(ExperimentConfig(dataset_path=str(path), test_fraction=0.2), 2)
        assert (len(data.train), len(data.test)) == (48, 12)

    def test_single_class(self, tmp_path):
        path = tmp_path / "one_class.csv"
        pd.DataFrame({"f0": [0.1] * 12, "f1": [0.9] * 12, "label": [1] * 12}).to_csv(path, index=False)
        with pytest.raises(SingleClassError) as excinfo:
            prepare_data(ExperimentConfig(dataset_path=str(path)), 2)
        assert excinfo.value.code == "empty-class"

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        pd.DataFrame({"body": ["great day"], "sentiment": ["1"]}).to_csv(path, index=False)
        with pytest.raises(SchemaMismatchError):
            prepare_data(ExperimentConfig(dataset_path=str(path), scheme="generic"), 2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetIOError):
            prepare_data(ExperimentConfig(dataset_path=str(tmp_path / "nope.csv"), scheme="generic"), 2)

    def test_text_dataset_drops(self, tmp_path):
        path = tmp_path / "mixed.csv"
        frame = gen_synthetic(40, seed=1, variant="tokens")
        frame["sentiment"] = frame["sentiment"].map({"0": "Negative", "1": "Extremely Positive"})
        extra = pd.DataFrame({"text": ["the and of", "lovely calm morning"], "sentiment": ["Positive", "Neutral"]})
        pd.concat([frame, extra]).to_csv(path, index=False)
        data = prepare_data(ExperimentConfig(dataset_path=str(path), scheme="CVTD"), 2)
        assert data.dropped == {"label": 1, "empty": 1}
        assert len(data.train) + len(data.test) == 40
        assert data.stats is not None


class TestRunExperiment:
    """Tests for complete runs and their output directory."""

    def test_run_directory(self, tmp_path):
        result = run_experiment(small_config(tmp_path, model="qfnn"))
        for name in RUN_FILES:
            assert (result.output_dir / name).exists(), name
        metrics = json.loads((result.output_dir / "metrics.json").read_text(encoding="utf-8"))
        assert metrics["format"] == METRICS_FORMAT
        assert metrics["model"] == "qfnn"
        assert metrics["n_train"] == 20
        assert metrics["n_test"] == 20
        assert 0.0 <= metrics["summary"]["accuracy"] <= 1.0
        history = pd.read_csv(result.output_dir / "history.csv")
        assert list(history.columns) == ["epoch", "loss", "train_acc", "test_acc"]
        assert list(history["epoch"]) == [1, 2]
        predictions = pd.read_csv(result.output_dir / "predictions.csv")
        assert list(predictions.columns) == ["index", "score", "label", "prediction"]
        assert len(predictions) == 20

    def test_reproducible(self, tmp_path):
        """Same configuration, same bytes (timing lives in its own file)."""
        first = run_experiment(small_config(tmp_path, "a", model="qfnn"))
        second = run_experiment(small_config(tmp_path, "b", model="qfnn"))
        for name in ("metrics.json", "history.csv", "predictions.csv", "params.txt"):
            assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes(), name

    def test_metrics_recompute(self, tmp_path):
        result = run_experiment(small_config(tmp_path, model="ann"))
        assert compare(result.output_dir, 1e-9) == []

    def test_recompute_detects_tampering(self, tmp_path):
        result = run_experiment(small_config(tmp_path, model="ann"))
        path = result.output_dir / "metrics.json"
        metrics = json.loads(path.read_text(encoding="utf-8"))
        metrics["summary"]["accuracy"] = 1.5
        path.write_text(json.dumps(metrics), encoding="utf-8")
        assert any(line.startswith("accuracy") for line in compare(result.output_dir, 1e-9))

    def test_cf_run(self, tmp_path):
        result = run_experiment(small_config(tmp_path, model="cf", synthetic_n=100))
        assert result.params.shape == (9,)
        assert result.summary.accuracy >= 0.75

    @pytest.mark.parametrize("model", ["qnn", "hqnn", "hfnn"])
    def test_other_models_run(self, tmp_path, model):
        result = run_experiment(small_config(tmp_path, model=model, train=TrainConfig(epochs=1, batch_size=10)))
        assert len(result.history) == 1
        assert 0.0 <= result.summary.accuracy <= 1.0

    def test_text_run_and_evaluate(self, tmp_path, tweets_csv):
        cfg = small_config(tmp_path, model="cf", dataset_path=str(tweets_csv), scheme="generic")
        result = run_experiment(cfg)
        assert (result.output_dir / "corpus_stats.json").exists()
        assert result.summary.accuracy >= 0.9

        evaluation = evaluate_checkpoint(result.output_dir, tweets_csv, "generic")
        assert evaluation.n_test == 120
        assert evaluation.output_dir == result.output_dir / "evaluation"
        assert (evaluation.output_dir / "metrics.json").exists()
        assert evaluation.summary.accuracy >= 0.9

    def test_evaluate_numeric(self, tmp_path):
        result = run_experiment(small_config(tmp_path, model="ann"))
        path = tmp_path / "numeric.csv"
        gen_synthetic(30, seed=9, output=path)
        evaluation = evaluate_checkpoint(result.output_dir, path, "synthetic", output_dir=tmp_path / "eval")
        assert evaluation.n_test == 30
        assert compare(tmp_path / "eval", 1e-9) == []

    def test_evaluate_text_needs_stats(self, tmp_path, tweets_csv):
        result = run_experiment(small_config(tmp_path, model="ann"))
        with pytest.raises(SchemaMismatchError):
            evaluate_checkpoint(result.output_dir, tweets_csv, "generic")

    def test_evaluate_unknown_scheme(self, tmp_path, tweets_csv):
        """The scheme is checked before the run directory is read."""
        with pytest.raises(InvalidArgumentError) as excinfo:
            evaluate_checkpoint(tmp_path / "missing", tweets_csv, "IMDB")
        assert excinfo.value.code == "invalid-args"

    def test_preprocess_dataset(self, tmp_path, tweets_csv):
        cfg = small_config(tmp_path, "prep", dataset_path=str(tweets_csv), scheme="generic", test_fraction=0.3)
        output = preprocess_dataset(cfg)
        manifest = json.loads((output / "manifest.json").read_text(encoding="utf-8"))
        assert (manifest["n_train"], manifest["n_test"]) == (84, 36)
        train_frame = pd.read_csv(output / "train.csv")
        assert list(train_frame.columns) == ["token_list", "f0", "f1", "label"]
        assert len(train_frame) == 84
        assert (output / "corpus_stats.json").exists()

    def test_preprocess_rejects_synthetic(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            preprocess_dataset(small_config(tmp_path))


class TestNoiseSweep:
    """Tests for noise sweeps."""

    def test_full_grid(self, tmp_path):
        cfg = small_config(tmp_path, model="qfnn", train=TrainConfig(epochs=1, batch_size=10), noise=NoiseConfig())
        result = run_noise_sweep(cfg)
        table = pd.read_csv(result.output_dir / "noise_sweep.csv")
        assert list(table.columns) == ["channel", "p", "accuracy"]
        assert len(table) == 60
        clean = result.summary.accuracy
        for acc in table[table["p"] == 0.0]["accuracy"]:
            assert abs(acc - clean) <= 0.01
        dp_high = table[(table["channel"] == "DP") & (table["p"].round(6) == 0.9)]["accuracy"]
        assert float(dp_high.iloc[0]) > 0.0

    def test_full_depolarizing_final_only(self, tmp_path):
        """<Z> = 0 everywhere, so every score ties at 0.5 and predicts positive."""
        noise = NoiseConfig(channels=["DP"], grid=[0.0, 1.0], placement=PlacementMode.FINAL_ONLY)
        cfg = small_config(tmp_path, model="qnn", train=TrainConfig(epochs=1, batch_size=10), noise=noise)
        result = run_noise_sweep(cfg)
        positive_fraction = float(np.mean(result.evaluation.labels))
        row = result.noise_table[result.noise_table["p"] == 1.0].iloc[0]
        assert row["accuracy"] == pytest.approx(positive_fraction)

    def test_train_mode(self, tmp_path):
        noise = NoiseConfig(channels=["AD"], grid=[0.1, 0.3], mode="train")
        cfg = small_config(tmp_path, model="qfnn", synthetic_n=20,
                           train=TrainConfig(epochs=1, batch_size=10), noise=noise)
        result = run_noise_sweep(cfg)
        assert len(result.noise_table) == 2

    def test_unsupported_model(self, tmp_path):
        with pytest.raises(UnsupportedModelError):
            run_noise_sweep(small_config(tmp_path, model="hqnn"))


class TestCli:
    """Tests for the command line entry point."""

    def test_gen_synthetic(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert main(["gen-synthetic", "--n", "50", "--out", str(out)]) == 0
        assert len(pd.read_csv(out)) == 50
        assert last_json(capsys.readouterr().out)["rows"] == 50

    def test_train(self, tmp_path, capsys):
        out = tmp_path / "cli-run"
        code = main(["train", "--model", "cf", "--epochs", "1", "--synthetic-n", "40", "--out", str(out)])
        assert code == 0
        assert (out / "params.txt").exists()
        assert last_json(capsys.readouterr().out)["model"] == "cf"

    def test_invalid_config(self, tmp_path, capsys):
        code = main(["train", "--test-fraction", "0.25", "--out", str(tmp_path / "x")])
        assert code == 2
        assert last_json(capsys.readouterr().err)["error"] == "invalid-args"

    def test_missing_run(self, tmp_path, capsys):
        data = tmp_path / "s.csv"
        gen_synthetic(20, output=data)
        code = main(["evaluate", "--run", str(tmp_path / "missing"), "--dataset", str(data), "--scheme", "synthetic"])
        assert code == 2
        assert last_json(capsys.readouterr().err)["error"] == "io-error"


@pytest.mark.slow
class TestLearning:
    """Held-out accuracy on well-separated synthetic data."""

    def test_ann(self, tmp_path):
        cfg = ExperimentConfig(model="ann", output_dir=str(tmp_path / "ann"),
                               train=TrainConfig(epochs=100, batch_size=16, lr=0.05))
        assert run_experiment(cfg).summary.accuracy >= 0.9

    def test_cf(self, tmp_path):
        cfg = ExperimentConfig(model="cf", output_dir=str(tmp_path / "cf"))
        assert run_experiment(cfg).summary.accuracy >= 0.9

    def test_qfnn_across_seeds(self, tmp_path):
        """At most one of five seeds may fall below 95% held-out accuracy, each within a minute."""
        accuracies, seconds = [], []
        for seed in range(5):
            cfg = ExperimentConfig(model="qfnn", seed=seed, output_dir=str(tmp_path / f"qfnn-{seed}"),
                                   train=TrainConfig(epochs=100, lr=0.01, seed=seed))
            started = time.perf_counter()
            result = run_experiment(cfg)
            seconds.append(time.perf_counter() - started)
            assert result.history[-1].loss < result.history[0].loss
            accuracies.append(result.summary.accuracy)
        assert sum(a < 0.95 for a in accuracies) <= 1, accuracies
        assert max(seconds) < 60, seconds


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
