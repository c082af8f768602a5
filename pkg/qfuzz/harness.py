"""
QFuzz Sentiment - Experiment Harness
====================================

Orchestrates one experiment end to end:

    ingest -> preprocess -> seeded split -> CorpusStats on the train split
    -> train -> evaluate -> write the run directory

Run directory contents:
    config.json        validated configuration echo
    metrics.json       counts, seven ratios, AUC (format qfuzz-metrics/1)
    history.csv        epoch,loss,train_acc,test_acc
    predictions.csv    index,score,label,prediction
    roc.csv            fpr,tpr
    noise_sweep.csv    channel,p,accuracy (noise sweeps only)
    params.txt         checkpoint
    corpus_stats.json  text datasets only
    timing.json        wall-clock seconds (kept apart so metrics.json is reproducible)
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .channels import DEFAULT_NOISE_GRID, ChannelLabel, NoisePlacement, PlacementMode, make_channel
from .checkpoint import PARAMS_FILE, STATS_FILE, Checkpoint, save_corpus_stats, save_params
from .errors import (
    DatasetIOError,
    EmptyInputError,
    InvalidArgumentError,
    SchemaMismatchError,
    SingleClassError,
    UnsupportedModelError,
)
from .metrics import ConfusionCounts, MetricsSummary, RocCurve, confusion, roc_auc, summary
from .models import SentimentModel, build_model
from .optim import EpochRecord, TrainConfig, accuracy, train
from .simulators import CircuitSimulator, DensityMatrixSimulator
from .synthetic import gen_synthetic
from .textprep import (
    CorpusStats,
    FeatureRecord,
    LabelScheme,
    TextPreprocessor,
    binarize_label,
    build_feature_record,
)

logger = logging.getLogger(__name__)

METRICS_FORMAT = "qfuzz-metrics/1"
PREPROCESSED_FORMAT = "qfuzz-preprocessed/1"
ALLOWED_TEST_FRACTIONS = (0.2, 0.3, 0.5)
NOISE_MODELS = ("qfnn", "qnn")

_TRAIN_KEYS = ("epochs", "batch_size", "lr", "loss", "gradient_mode", "workers")
_NOISE_KEYS = {
    "noise_channels": "channels",
    "noise_grid": "grid",
    "noise_placement": "placement",
    "noise_qubits": "qubits",
    "noise_mode": "mode",
}


# ==========================================
# Configuration
# ==========================================

class NoiseConfig(BaseModel):
    """Noise sweep settings."""
    channels: List[ChannelLabel] = Field(default_factory=lambda: list(ChannelLabel))
    grid: List[float] = Field(default_factory=lambda: list(DEFAULT_NOISE_GRID))
    placement: PlacementMode = PlacementMode.AFTER_EACH_LAYER
    qubits: Union[Literal["all"], List[int]] = "all"
    mode: Literal["evaluate", "train"] = "evaluate"

    @field_validator("grid")
    @classmethod
    def _grid_in_range(cls, grid: List[float]) -> List[float]:
        if not grid or any(not 0.0 <= p <= 1.0 for p in grid):
            raise ValueError("noise grid values must be in [0, 1]")
        return grid

    def placement_spec(self) -> NoisePlacement:
        qubits = "all" if self.qubits == "all" else tuple(self.qubits)
        return NoisePlacement(self.placement, qubits)


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one run."""
    model: Literal["qfnn", "qnn", "hqnn", "hfnn", "ann", "cf"] = "qfnn"
    dataset_path: Optional[str] = None
    scheme: Literal["CVTD", "GSTD", "generic", "synthetic"] = "synthetic"
    text_column: str = "text"
    label_column: str = "sentiment"
    test_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    allow_any_fraction: bool = False
    train_cap: int = Field(default=1000, ge=1)
    test_cap: int = Field(default=500, ge=1)
    seed: int = Field(default=42, ge=0)
    train: TrainConfig = Field(default_factory=TrainConfig)

    # Model options
    readout: Literal["sigmoid", "qfm"] = "sigmoid"
    embedding_axis: Literal["x", "y"] = "x"
    fuzzy_block_count: int = Field(default=4, ge=1)
    layer2_extra_ry: bool = False
    ansatz: Literal["efficient_su2", "real_amplitudes"] = "efficient_su2"
    activation: Literal["tanh", "relu"] = "tanh"
    consequent_mode: Literal["fraction", "majority"] = "fraction"

    # Text features
    keep_negations: bool = True
    aggregate: Literal["sum", "max", "probabilistic_sum"] = "sum"

    # Synthetic data generated in memory when no dataset_path is given
    synthetic_n: int = Field(default=200, ge=10)
    synthetic_margin: float = Field(default=0.2, gt=0.0, lt=0.5)

    noise: Optional[NoiseConfig] = None
    output_dir: str = "runs/latest"

    @model_validator(mode="after")
    def _check_fraction(self) -> "ExperimentConfig":
        if not self.allow_any_fraction and round(self.test_fraction, 6) not in ALLOWED_TEST_FRACTIONS:
            raise ValueError(
                f"test_fraction must be one of {ALLOWED_TEST_FRACTIONS} unless allow_any_fraction is set"
            )
        if self.scheme != "synthetic" and not self.dataset_path:
            raise ValueError(f"scheme {self.scheme} needs a dataset_path")
        return self

    @classmethod
    def from_flat(cls, values: Mapping[str, Any]) -> "ExperimentConfig":
        """
        Build from flat key=value pairs (config files and CLI flags).

        Training keys (epochs, lr, ...) and noise_* keys are nested; seed
        seeds both the split and the training loop.
        """
        flat = {k.lower(): v for k, v in values.items() if v is not None and v != ""}
        train_values = {k: flat.pop(k) for k in _TRAIN_KEYS if k in flat}
        noise_values = {}
        for key, target in _NOISE_KEYS.items():
            if key in flat:
                value = flat.pop(key)
                if target in ("channels", "grid") and isinstance(value, str):
                    value = [v.strip() for v in value.split(",") if v.strip()]
                if target == "qubits" and isinstance(value, str) and value != "all":
                    value = [int(v) for v in value.split(",") if v.strip()]
                noise_values[target] = value
        if "seed" in flat:
            train_values["seed"] = flat["seed"]
        noise_flag = str(flat.pop("noise", "")).lower() in ("1", "true", "yes")
        try:
            config = cls(
                **flat,
                train=TrainConfig(**train_values),
                noise=NoiseConfig(**noise_values) if noise_values or noise_flag else None,
            )
        except ValidationError as e:
            raise InvalidArgumentError(
                f"Invalid experiment configuration: {e.error_count()} error(s)",
                {"errors": [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]},
            ) from None
        return config

    @classmethod
    def from_file(cls, path: Optional[Union[str, Path]] = None,
                  overrides: Optional[Mapping[str, Any]] = None,
                  defaults: Optional[Mapping[str, Any]] = None) -> "ExperimentConfig":
        """Layer defaults, then a key=value file, then overrides."""
        values: Dict[str, Any] = {k.lower(): v for k, v in (defaults or {}).items()}
        if path is not None:
            path = Path(path)
            if not path.exists():
                raise DatasetIOError(f"Config file not found: {path}")
            values.update({k.lower(): v for k, v in dotenv_values(path).items()})
        values.update({k.lower(): v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_flat(values)

    def build_model(self, simulator: Optional[CircuitSimulator] = None) -> SentimentModel:
        return build_model(
            self.model,
            simulator=simulator,
            gradient_mode=self.train.gradient_mode,
            readout=self.readout,
            embedding_axis=self.embedding_axis,
            fuzzy_block_count=self.fuzzy_block_count,
            layer2_extra_ry=self.layer2_extra_ry,
            ansatz=self.ansatz,
            activation=self.activation,
            consequent_mode=self.consequent_mode,
        )


# ==========================================
# Data
# ==========================================

@dataclass
class PreparedData:
    """Feature records for both splits plus ingestion bookkeeping."""
    train: List[FeatureRecord]
    test: List[FeatureRecord]
    test_rows: List[int]
    stats: Optional[CorpusStats] = None
    dropped: Dict[str, int] = field(default_factory=dict)


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise DatasetIOError(f"Dataset not found: {path}", {"path": str(path)}) from None
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise DatasetIOError(f"Cannot read dataset {path}: {e}", {"path": str(path)}) from None


def load_text_rows(frame: pd.DataFrame, scheme: str, text_column: str, label_column: str,
                   preprocessor: TextPreprocessor) -> Tuple[List[int], List[List[str]], List[int], Dict[str, int]]:
    """
    Preprocess and binarize every row, dropping neutral and empty ones.

    Returns:
        tuple: (source row indices, token lists, labels, drop counts)
    """
    missing = [c for c in (text_column, label_column) if c not in frame.columns]
    if missing:
        raise SchemaMismatchError(
            f"Dataset is missing column(s): {missing}",
            {"missing": missing, "columns": list(frame.columns)},
        )
    rows, token_lists, labels = [], [], []
    dropped = {"label": 0, "empty": 0}
    for index, (text, source) in enumerate(zip(frame[text_column], frame[label_column])):
        label = binarize_label(source, scheme)
        if label is None:
            dropped["label"] += 1
            continue
        try:
            tokens = preprocessor.preprocess(text)
        except EmptyInputError:
            dropped["empty"] += 1
            continue
        rows.append(index)
        token_lists.append(tokens)
        labels.append(label)
    return rows, token_lists, labels, dropped


def load_numeric_rows(frame: pd.DataFrame, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    columns = [f"f{k}" for k in range(dim)] + ["label"]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaMismatchError(
            f"Numeric dataset is missing column(s): {missing}",
            {"missing": missing, "columns": list(frame.columns)},
        )
    try:
        features = frame[columns[:-1]].astype(float).to_numpy()
        labels = frame["label"].astype(float).astype(int).to_numpy()
    except ValueError as e:
        raise SchemaMismatchError(f"Numeric dataset has non-numeric values: {e}") from None
    return features, labels


def split_indices(n: int, test_fraction: float, seed: int,
                  train_cap: int, test_cap: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded disjoint split; caps take the leading rows of each side.

    The test side is the first round(n * test_fraction) rows of the
    shuffle, the train side the rest.
    """
    order = np.random.default_rng(seed).permutation(n)
    n_test = int(round(n * test_fraction))
    test = order[:n_test][:test_cap]
    train_part = order[n_test:][:train_cap]
    return train_part, test


def _require_both_classes(labels: Sequence[int], split: str) -> None:
    present = set(int(v) for v in labels)
    if present != {0, 1}:
        raise SingleClassError(
            f"The {split} split contains only class(es) {sorted(present)}",
            code="empty-class",
            details={"split": split, "classes": sorted(present)},
        )


def prepare_data(cfg: ExperimentConfig, dim: int) -> PreparedData:
    """Ingest, split and featurize according to the configuration."""
    if cfg.scheme == "synthetic":
        if cfg.dataset_path:
            features, labels = load_numeric_rows(read_csv(cfg.dataset_path), dim)
        else:
            frame = gen_synthetic(cfg.synthetic_n, cfg.synthetic_margin, cfg.seed, dim=dim)
            features = frame[[f"f{k}" for k in range(dim)]].to_numpy(dtype=float)
            labels = frame["label"].to_numpy(dtype=int)
        if len(labels) == 0:
            raise EmptyInputError("Dataset has no rows", code="empty-dataset")
        train_idx, test_idx = split_indices(len(labels), cfg.test_fraction, cfg.seed, cfg.train_cap, cfg.test_cap)
        _require_both_classes(labels[train_idx], "train")
        _require_both_classes(labels[test_idx], "test")
        return PreparedData(
            train=[FeatureRecord.from_features(features[i], labels[i]) for i in train_idx],
            test=[FeatureRecord.from_features(features[i], labels[i]) for i in test_idx],
            test_rows=[int(i) for i in test_idx],
            dropped={"label": 0, "empty": 0},
        )

    preprocessor = TextPreprocessor(keep_negations=cfg.keep_negations)
    rows, token_lists, labels, dropped = load_text_rows(
        read_csv(cfg.dataset_path), LabelScheme.parse(cfg.scheme), cfg.text_column, cfg.label_column, preprocessor
    )
    if not rows:
        raise EmptyInputError("No usable rows after cleaning and label mapping", code="empty-dataset",
                              details=dropped)
    logger.info(f"Ingested {len(rows)} usable row(s); dropped {dropped}")

    train_idx, test_idx = split_indices(len(rows), cfg.test_fraction, cfg.seed, cfg.train_cap, cfg.test_cap)
    labels_array = np.asarray(labels)
    _require_both_classes(labels_array[train_idx], "train")
    _require_both_classes(labels_array[test_idx], "test")

    stats = CorpusStats.fit([token_lists[i] for i in train_idx], [labels[i] for i in train_idx],
                            aggregate=cfg.aggregate)
    return PreparedData(
        train=[build_feature_record(token_lists[i], labels[i], stats, dim) for i in train_idx],
        test=[build_feature_record(token_lists[i], labels[i], stats, dim) for i in test_idx],
        test_rows=[rows[i] for i in test_idx],
        stats=stats,
        dropped=dropped,
    )


# ==========================================
# Results
# ==========================================

@dataclass
class Evaluation:
    scores: np.ndarray
    labels: np.ndarray
    counts: ConfusionCounts
    summary: MetricsSummary
    roc: Optional[RocCurve]


@dataclass
class RunResult:
    """What a run produced, mirrored on disk in output_dir."""
    config: Dict[str, Any]
    model_name: str
    params: np.ndarray
    history: List[EpochRecord]
    evaluation: Evaluation
    seconds: float
    output_dir: Path
    n_train: int = 0
    n_test: int = 0
    noise_table: Optional[pd.DataFrame] = None

    @property
    def summary(self) -> MetricsSummary:
        return self.evaluation.summary

    @property
    def roc(self) -> Optional[RocCurve]:
        return self.evaluation.roc


def evaluate_scores(scores: Sequence[float], labels: Sequence[int]) -> Evaluation:
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    counts = confusion(scores, labels, 0.5)
    roc = roc_auc(scores, labels) if len(set(labels.tolist())) == 2 else None
    return Evaluation(scores, labels, counts, summary(counts), roc)


def score_records(model: SentimentModel, params: np.ndarray, records: Sequence[FeatureRecord],
                  workers: int = 1) -> np.ndarray:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(lambda r: model.score(params, r.features), records)))
    return np.array([model.score(params, r.features) for r in records])


def _rounded(value: Any) -> Any:
    if isinstance(value, float):
        return round(value, 12)
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def _write_json(path: Path, payload: Mapping[str, Any]) -> None:
    path.write_text(json.dumps(_rounded(dict(payload)), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_metrics(output_dir: Path, model_name: str, evaluation: Evaluation,
                  n_train: int, dropped: Mapping[str, int]) -> None:
    """metrics.json, predictions.csv and roc.csv."""
    summary_payload: Dict[str, Any] = evaluation.summary.to_dict()
    summary_payload["counts"] = evaluation.counts.to_dict()
    summary_payload["flags"] = list(evaluation.summary.flags)
    _write_json(output_dir / "metrics.json", {
        "format": METRICS_FORMAT,
        "model": model_name,
        "summary": summary_payload,
        "auc": evaluation.roc.auc if evaluation.roc is not None else None,
        "n_train": n_train,
        "n_test": int(evaluation.labels.size),
        "dropped": dict(dropped),
    })


def write_predictions(output_dir: Path, evaluation: Evaluation, rows: Sequence[int]) -> None:
    pd.DataFrame({
        "index": list(rows),
        "score": evaluation.scores,
        "label": evaluation.labels,
        "prediction": (evaluation.scores >= 0.5).astype(int),
    }).to_csv(output_dir / "predictions.csv", index=False, float_format="%.12f")
    if evaluation.roc is not None:
        pd.DataFrame(list(evaluation.roc.points), columns=["fpr", "tpr"]).to_csv(
            output_dir / "roc.csv", index=False, float_format="%.12f"
        )


def write_history(output_dir: Path, history: Sequence[EpochRecord]) -> None:
    pd.DataFrame(
        [(h.epoch, h.loss, h.train_acc, h.test_acc) for h in history],
        columns=["epoch", "loss", "train_acc", "test_acc"],
    ).to_csv(output_dir / "history.csv", index=False, float_format="%.6f")


def _prepare_output(cfg: ExperimentConfig) -> Path:
    output_dir = Path(cfg.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    _write_json(output_dir / "config.json", cfg.model_dump(mode="json"))
    return output_dir


def _banner(title: str) -> None:
    logger.info("=" * 50)
    logger.info(title)
    logger.info("=" * 50)


# ==========================================
# Experiments
# ==========================================

def _fit(cfg: ExperimentConfig, simulator: Optional[CircuitSimulator] = None):
    model = cfg.build_model(simulator)
    data = prepare_data(cfg, model.input_dim)
    logger.info(f"Split: {len(data.train)} train / {len(data.test)} test")
    result = train(model, data.train, cfg.train, data.test)
    return model, data, result


def _persist(cfg: ExperimentConfig, output_dir: Path, model: SentimentModel, data: PreparedData,
             result, evaluation: Evaluation) -> None:
    write_metrics(output_dir, model.name, evaluation, len(data.train), data.dropped)
    write_predictions(output_dir, evaluation, data.test_rows)
    write_history(output_dir, result.history)
    save_params(output_dir / PARAMS_FILE, model, result.params)
    if data.stats is not None:
        save_corpus_stats(output_dir / STATS_FILE, data.stats)


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Train and evaluate one model, writing the run directory."""
    started = time.perf_counter()
    _banner(f"🚀 Experiment: {cfg.model} on {cfg.dataset_path or 'synthetic data'}")
    output_dir = _prepare_output(cfg)

    model, data, result = _fit(cfg)
    scores = score_records(model, result.params, data.test, cfg.train.workers)
    evaluation = evaluate_scores(scores, [r.label for r in data.test])
    _persist(cfg, output_dir, model, data, result, evaluation)

    seconds = time.perf_counter() - started
    _write_json(output_dir / "timing.json", {"seconds": seconds})
    auc = f"{evaluation.roc.auc:.4f}" if evaluation.roc is not None else "n/a"
    _banner(f"✅ {cfg.model}: accuracy {evaluation.summary.accuracy:.4f}, AUC {auc} ({seconds:.1f}s)")

    return RunResult(
        config=cfg.model_dump(mode="json"),
        model_name=model.name,
        params=result.params,
        history=result.history,
        evaluation=evaluation,
        seconds=seconds,
        output_dir=output_dir,
        n_train=len(data.train),
        n_test=len(data.test),
    )


def run_noise_sweep(cfg: ExperimentConfig) -> RunResult:
    """
    Train once, then measure test accuracy for every channel and p.

    With noise.mode = "evaluate" training is noiseless; with "train" the
    model is trained under the first channel at the first grid value.
    """
    if cfg.model not in NOISE_MODELS:
        raise UnsupportedModelError(
            f"Noise sweeps need a circuit-only model {NOISE_MODELS}, got {cfg.model}",
            {"model": cfg.model},
        )
    noise = cfg.noise or NoiseConfig()
    placement = noise.placement_spec()
    started = time.perf_counter()
    _banner(f"🌀 Noise sweep: {cfg.model}, channels {[c.value for c in noise.channels]}")
    output_dir = _prepare_output(cfg)

    training_simulator = None
    if noise.mode == "train":
        training_simulator = DensityMatrixSimulator(make_channel(noise.channels[0], noise.grid[0]), placement)
    model, data, result = _fit(cfg, training_simulator)

    clean_model = model if training_simulator is None else cfg.build_model()
    scores = score_records(clean_model, result.params, data.test, cfg.train.workers)
    evaluation = evaluate_scores(scores, [r.label for r in data.test])
    _persist(cfg, output_dir, model, data, result, evaluation)

    labels = evaluation.labels
    grid = [(channel, float(p)) for channel in noise.channels for p in noise.grid]

    def sweep_point(point: Tuple[ChannelLabel, float]) -> float:
        channel, p = point
        noisy_model = model.with_simulator(DensityMatrixSimulator(make_channel(channel, p), placement))
        return accuracy(score_records(noisy_model, result.params, data.test), labels)

    if cfg.train.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.train.workers) as pool:
            accuracies = list(pool.map(sweep_point, grid))
    else:
        accuracies = [sweep_point(point) for point in grid]

    table = pd.DataFrame({
        "channel": [c.value for c, _ in grid],
        "p": [p for _, p in grid],
        "accuracy": accuracies,
    })
    table.to_csv(output_dir / "noise_sweep.csv", index=False, float_format="%.6f")
    for (channel, p), acc in zip(grid, accuracies):
        logger.info(f"   {channel.value:>3} p={p:.2f} accuracy={acc:.4f}")

    seconds = time.perf_counter() - started
    _write_json(output_dir / "timing.json", {"seconds": seconds})
    _banner(f"✅ Noise sweep finished: {len(table)} row(s) ({seconds:.1f}s)")

    return RunResult(
        config=cfg.model_dump(mode="json"),
        model_name=model.name,
        params=result.params,
        history=result.history,
        evaluation=evaluation,
        seconds=seconds,
        output_dir=output_dir,
        n_train=len(data.train),
        n_test=len(data.test),
        noise_table=table,
    )


def evaluate_checkpoint(run_dir: Union[str, Path], dataset_path: Union[str, Path], scheme: str,
                        text_column: str = "text", label_column: str = "sentiment",
                        output_dir: Optional[Union[str, Path]] = None,
                        keep_negations: bool = True) -> RunResult:
    """Score every usable row of a dataset with a saved run; no training."""
    started = time.perf_counter()
    label_scheme = None if scheme == "synthetic" else LabelScheme.parse(scheme)
    checkpoint = Checkpoint.load(run_dir)
    model = checkpoint.model
    frame = read_csv(dataset_path)
    dropped = {"label": 0, "empty": 0}

    if scheme == "synthetic":
        features, labels = load_numeric_rows(frame, model.input_dim)
        records = [FeatureRecord.from_features(f, y) for f, y in zip(features, labels)]
        rows = list(range(len(records)))
    else:
        if checkpoint.stats is None:
            raise SchemaMismatchError(f"{run_dir} has no corpus statistics for text scoring")
        rows, token_lists, labels, dropped = load_text_rows(
            frame, label_scheme, text_column, label_column, TextPreprocessor(keep_negations)
        )
        records = [build_feature_record(t, y, checkpoint.stats, model.input_dim)
                   for t, y in zip(token_lists, labels)]
    if not records:
        raise EmptyInputError("No usable rows to evaluate", code="empty-dataset")

    output_dir = Path(output_dir) if output_dir is not None else Path(run_dir) / "evaluation"
    output_dir.mkdir(parents=True, exist_ok=True)
    scores = score_records(model, checkpoint.params, records)
    evaluation = evaluate_scores(scores, [r.label for r in records])
    write_metrics(output_dir, model.name, evaluation, 0, dropped)
    write_predictions(output_dir, evaluation, rows)
    seconds = time.perf_counter() - started
    _write_json(output_dir / "timing.json", {"seconds": seconds})
    logger.info(f"Evaluated {len(records)} row(s): accuracy {evaluation.summary.accuracy:.4f}")

    return RunResult(
        config={"run_dir": str(run_dir), "dataset_path": str(dataset_path), "scheme": scheme},
        model_name=model.name,
        params=checkpoint.params,
        history=[],
        evaluation=evaluation,
        seconds=seconds,
        output_dir=output_dir,
        n_test=len(records),
    )


def preprocess_dataset(cfg: ExperimentConfig, dim: int = 2) -> Path:
    """Write featurized train.csv / test.csv for a text dataset."""
    if cfg.scheme == "synthetic":
        raise InvalidArgumentError("preprocess applies to text datasets only")
    output_dir = Path(cfg.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    data = prepare_data(cfg, dim)
    for split, records in (("train", data.train), ("test", data.test)):
        frame = pd.DataFrame({"token_list": [" ".join(r.tokens) for r in records]})
        for k in range(dim):
            frame[f"f{k}"] = [r.features[k] for r in records]
        frame["label"] = [r.label for r in records]
        frame.to_csv(output_dir / f"{split}.csv", index=False, float_format="%.12f")
    save_corpus_stats(output_dir / STATS_FILE, data.stats)
    _write_json(output_dir / "manifest.json", {
        "format": PREPROCESSED_FORMAT,
        "dim": dim,
        "n_train": len(data.train),
        "n_test": len(data.test),
        "dropped": data.dropped,
        "source": cfg.dataset_path,
    })
    logger.info(f"Preprocessed {len(data.train)} + {len(data.test)} row(s) into {output_dir}")
    return output_dir
