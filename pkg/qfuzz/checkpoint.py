"""
QFuzz Sentiment - Checkpoints
=============================

A trained run directory holds:

    params.txt          model name, options and parameter blocks
    corpus_stats.json   training vocabulary statistics (text datasets only)

params.txt is line oriented:

    # qfuzz model parameters
    format qfuzz-params/1
    model qfnn
    option readout sigmoid
    param theta 8
    0.1234 2.3456 ...
    end

Each "param" line gives a block name and its shape (dims joined by "x"),
followed by one line of row-major values written with 17 significant
digits so they reload bit for bit.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .errors import CheckpointFormatError, DatasetIOError
from .models import SentimentModel, build_model
from .textprep import CorpusStats

logger = logging.getLogger(__name__)

PARAMS_FORMAT = "qfuzz-params/1"
STATS_FORMAT = "qfuzz-corpus-stats/1"
PARAMS_FILE = "params.txt"
STATS_FILE = "corpus_stats.json"


def _format_value(value: float) -> str:
    return format(float(value), ".17g")


def save_params(path: Union[str, Path], model: SentimentModel, params: np.ndarray) -> Path:
    """Write a model's parameters in the plain-text checkpoint format."""
    lines = ["# qfuzz model parameters", f"format {PARAMS_FORMAT}", f"model {model.name}"]
    for key, value in sorted(model.options().items()):
        lines.append(f"option {key} {value}")
    for name, block in model.param_blocks(params).items():
        shape = "x".join(str(d) for d in block.shape)
        lines.append(f"param {name} {shape}")
        lines.append(" ".join(_format_value(v) for v in block.reshape(-1)))
    lines.append("end")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_params(path: Union[str, Path]) -> Tuple[str, Dict[str, str], Dict[str, np.ndarray]]:
    """
    Parse a checkpoint file.

    Returns:
        tuple: (model name, options, parameter blocks)
    """
    path = Path(path)
    try:
        lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    except OSError as e:
        raise DatasetIOError(f"Cannot read checkpoint {path}: {e}") from None
    lines = [ln for ln in lines if ln and not ln.startswith("#")]

    if not lines or lines[0] != f"format {PARAMS_FORMAT}":
        raise CheckpointFormatError(f"{path} is not a {PARAMS_FORMAT} file")
    model_name: Optional[str] = None
    options: Dict[str, str] = {}
    blocks: Dict[str, np.ndarray] = {}

    i = 1
    while i < len(lines):
        keyword, _, rest = lines[i].partition(" ")
        if keyword == "end":
            break
        if keyword == "model":
            model_name = rest
        elif keyword == "option":
            key, _, value = rest.partition(" ")
            options[key] = value
        elif keyword == "param":
            try:
                name, shape_text = rest.split()
                shape = tuple(int(d) for d in shape_text.split("x"))
                values = np.array([float(v) for v in lines[i + 1].split()])
            except (ValueError, IndexError) as e:
                raise CheckpointFormatError(f"Malformed parameter block at line {i + 1}: {e}") from None
            if values.size != int(np.prod(shape)):
                raise CheckpointFormatError(f"Block {name} has {values.size} values for shape {shape}")
            blocks[name] = values.reshape(shape)
            i += 1
        else:
            raise CheckpointFormatError(f"Unknown keyword {keyword!r} in {path}")
        i += 1
    else:
        raise CheckpointFormatError(f"{path} is missing its end marker")

    if model_name is None:
        raise CheckpointFormatError(f"{path} does not name a model")
    return model_name, options, blocks


class CorpusStatsFile(BaseModel):
    """JSON layout of corpus_stats.json."""
    format: str = STATS_FORMAT
    doc_count: int = Field(ge=1)
    aggregate: str = "sum"
    feature_min: List[float]
    feature_max: List[float]
    doc_freq: Dict[str, int]
    class_freq: Dict[str, Tuple[int, int]]

    @classmethod
    def from_stats(cls, stats: CorpusStats) -> "CorpusStatsFile":
        return cls(
            doc_count=stats.doc_count,
            aggregate=stats.aggregate,
            feature_min=list(stats.feature_min),
            feature_max=list(stats.feature_max),
            doc_freq=dict(sorted(stats.doc_freq.items())),
            class_freq={k: tuple(v) for k, v in sorted(stats.class_freq.items())},
        )

    def to_stats(self) -> CorpusStats:
        return CorpusStats(
            doc_count=self.doc_count,
            doc_freq=dict(self.doc_freq),
            class_freq={k: (int(v[0]), int(v[1])) for k, v in self.class_freq.items()},
            feature_min=tuple(self.feature_min),
            feature_max=tuple(self.feature_max),
            aggregate=self.aggregate,
        )


def save_corpus_stats(path: Union[str, Path], stats: CorpusStats) -> Path:
    path = Path(path)
    path.write_text(CorpusStatsFile.from_stats(stats).model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_corpus_stats(path: Union[str, Path]) -> CorpusStats:
    path = Path(path)
    try:
        document = CorpusStatsFile.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetIOError(f"Cannot read corpus statistics {path}: {e}") from None
    except ValidationError as e:
        raise CheckpointFormatError(f"Invalid corpus statistics {path}: {e.error_count()} error(s)") from None
    if document.format != STATS_FORMAT:
        raise CheckpointFormatError(f"{path} is not a {STATS_FORMAT} file")
    return document.to_stats()


@dataclass
class Checkpoint:
    """A reloaded model with its parameters and optional corpus statistics."""
    model: SentimentModel
    params: np.ndarray
    stats: Optional[CorpusStats] = None
    run_dir: Optional[Path] = None
    options: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, run_dir: Union[str, Path], **model_kwargs) -> "Checkpoint":
        run_dir = Path(run_dir)
        name, options, blocks = read_params(run_dir / PARAMS_FILE)
        model = build_model(name, **options, **model_kwargs)
        params = model.from_blocks(blocks)
        stats_path = run_dir / STATS_FILE
        stats = load_corpus_stats(stats_path) if stats_path.exists() else None
        logger.info(f"Loaded {name} checkpoint from {run_dir} ({params.size} parameters)")
        return cls(model, params, stats, run_dir, options)

    def save(self, run_dir: Union[str, Path]) -> Path:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        save_params(run_dir / PARAMS_FILE, self.model, self.params)
        if self.stats is not None:
            save_corpus_stats(run_dir / STATS_FILE, self.stats)
        return run_dir
