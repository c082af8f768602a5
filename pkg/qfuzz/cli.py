"""
QFuzz Sentiment - Command Line
==============================

Usage:
    python -m qfuzz gen-synthetic --n 200 --out data/synthetic.csv
    python -m qfuzz preprocess --dataset data/cvtd.csv --scheme CVTD --out runs/cvtd-prep
    python -m qfuzz train --config experiments/qfnn.env --epochs 100 --out runs/qfnn
    python -m qfuzz evaluate --run runs/qfnn --dataset data/test.csv --scheme generic
    python -m qfuzz noise-sweep --model qfnn --noise-channels DP,AD --out runs/noise

Flags override values read from --config (a flat KEY=value file).
Exit codes: 0 on success, 2 on a library error, 1 on anything else; the
error is printed to stderr as one JSON line.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from qfuzz.errors import QfuzzError
from qfuzz.harness import (
    ExperimentConfig,
    evaluate_checkpoint,
    preprocess_dataset,
    run_experiment,
    run_noise_sweep,
)
from qfuzz.logging_setup import setup_logging
from qfuzz.synthetic import gen_synthetic

logger = logging.getLogger(__name__)

# Flag dest -> ExperimentConfig key, for flags whose names differ
_RENAMED = {"dataset": "dataset_path", "out": "output_dir"}
_CONFIG_FLAGS = (
    "model", "dataset", "scheme", "text_column", "label_column", "test_fraction",
    "allow_any_fraction", "train_cap", "test_cap", "seed", "epochs", "batch_size", "lr",
    "loss", "gradient_mode", "workers", "readout", "embedding_axis", "fuzzy_block_count",
    "layer2_extra_ry", "ansatz", "activation", "consequent_mode", "keep_negations",
    "aggregate", "synthetic_n", "synthetic_margin", "noise_channels", "noise_grid",
    "noise_placement", "noise_qubits", "noise_mode", "out",
)


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None, help="Flat KEY=value experiment file.")
    p.add_argument("--model", type=str, choices=["qfnn", "qnn", "hqnn", "hfnn", "ann", "cf"],
                   help="Model to train (default qfnn).")
    p.add_argument("--dataset", type=str, help="Input CSV; omit for in-memory synthetic data.")
    p.add_argument("--scheme", type=str, choices=["CVTD", "GSTD", "generic", "synthetic"],
                   help="Label scheme (default synthetic).")
    p.add_argument("--text-column", dest="text_column", type=str, help="Text column (default text).")
    p.add_argument("--label-column", dest="label_column", type=str, help="Label column (default sentiment).")
    p.add_argument("--test-fraction", dest="test_fraction", type=float, help="0.2, 0.3 or 0.5 (default 0.5).")
    p.add_argument("--allow-any-fraction", dest="allow_any_fraction", action="store_true", default=None,
                   help="Accept any test fraction in (0, 1).")
    p.add_argument("--train-cap", dest="train_cap", type=int, help="Maximum training rows (default 1000).")
    p.add_argument("--test-cap", dest="test_cap", type=int, help="Maximum test rows (default 500).")
    p.add_argument("--seed", type=int, help=f"Split and training seed (default {settings.default_seed}).")

    p.add_argument("--epochs", type=int, help="Training epochs (default 20).")
    p.add_argument("--batch-size", dest="batch_size", type=int, help="Mini-batch size (default 32).")
    p.add_argument("--lr", type=float, help="ADAM learning rate (default 0.01).")
    p.add_argument("--loss", type=str, choices=["mse", "cross_entropy"], help="Loss (default mse).")
    p.add_argument("--gradient-mode", dest="gradient_mode", type=str,
                   choices=["parameter_shift", "finite_difference"], help="Circuit gradient method.")
    p.add_argument("--workers", type=int, help=f"Worker threads (default {settings.workers}).")

    p.add_argument("--readout", type=str, choices=["sigmoid", "qfm"], help="QFNN readout (default sigmoid).")
    p.add_argument("--embedding-axis", dest="embedding_axis", type=str, choices=["x", "y"])
    p.add_argument("--fuzzy-block-count", dest="fuzzy_block_count", type=int,
                   help="Shared-parameter fuzzy blocks in the QFNN (default 4).")
    p.add_argument("--layer2-extra-ry", dest="layer2_extra_ry", action="store_true", default=None)
    p.add_argument("--ansatz", type=str, choices=["efficient_su2", "real_amplitudes"])
    p.add_argument("--activation", type=str, choices=["tanh", "relu"], help="ANN hidden activation.")
    p.add_argument("--consequent-mode", dest="consequent_mode", type=str, choices=["fraction", "majority"])
    p.add_argument("--drop-negations", dest="keep_negations", action="store_false", default=None,
                   help="Treat negation words as stopwords.")
    p.add_argument("--aggregate", type=str, choices=["sum", "max", "probabilistic_sum"],
                   help="Word-association aggregation (default sum).")
    p.add_argument("--synthetic-n", dest="synthetic_n", type=int, help="In-memory synthetic rows (default 200).")
    p.add_argument("--synthetic-margin", dest="synthetic_margin", type=float)

    p.add_argument("--noise-channels", dest="noise_channels", type=str,
                   help="Comma-separated channels from BF,PF,BPF,DP,AD,PD (default all).")
    p.add_argument("--noise-grid", dest="noise_grid", type=str,
                   help="Comma-separated p values (default 0.0,...,0.9).")
    p.add_argument("--noise-placement", dest="noise_placement", type=str,
                   choices=["after_each_layer", "after_each_gate", "final_only"])
    p.add_argument("--noise-qubits", dest="noise_qubits", type=str, help="'all' or comma-separated indices.")
    p.add_argument("--noise-mode", dest="noise_mode", type=str, choices=["evaluate", "train"])
    p.add_argument("--out", type=str, help="Run output directory.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfuzz", description="Quantum fuzzy sentiment experiments.")
    parser.add_argument("--log-level", dest="log_level", type=str, default=settings.log_level)
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("train", "Train and evaluate one model."),
        ("noise-sweep", "Train once, then evaluate under each noise channel and p."),
        ("preprocess", "Featurize a text dataset into train.csv / test.csv."),
    ):
        _add_experiment_flags(commands.add_parser(name, help=help_text))

    evaluate = commands.add_parser("evaluate", help="Score a dataset with a saved run.")
    evaluate.add_argument("--run", required=True, type=str, help="Run directory holding params.txt.")
    evaluate.add_argument("--dataset", required=True, type=str)
    evaluate.add_argument("--scheme", type=str, default="generic", choices=["CVTD", "GSTD", "generic", "synthetic"])
    evaluate.add_argument("--text-column", dest="text_column", type=str, default="text")
    evaluate.add_argument("--label-column", dest="label_column", type=str, default="sentiment")
    evaluate.add_argument("--drop-negations", dest="keep_negations", action="store_false", default=True)
    evaluate.add_argument("--out", type=str, default=None, help="Output directory (default <run>/evaluation).")

    synthetic = commands.add_parser("gen-synthetic", help="Write a synthetic two-class dataset.")
    synthetic.add_argument("--n", type=int, default=200)
    synthetic.add_argument("--margin", type=float, default=0.2)
    synthetic.add_argument("--seed", type=int, default=settings.default_seed)
    synthetic.add_argument("--dim", type=int, default=2, choices=[2, 4])
    synthetic.add_argument("--variant", type=str, default="numeric", choices=["numeric", "tokens"])
    synthetic.add_argument("--out", type=str, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides: Dict[str, Any] = {}
    for flag in _CONFIG_FLAGS:
        value = getattr(args, flag, None)
        if value is not None:
            overrides[_RENAMED.get(flag, flag)] = value
    if args.command == "noise-sweep":
        overrides["noise"] = "true"
    defaults = {
        "seed": settings.default_seed,
        "workers": settings.workers,
        "output_dir": str(Path(settings.output_dir) / "latest"),
    }
    if "dataset_path" in overrides:
        defaults["scheme"] = "generic"
    return ExperimentConfig.from_file(args.config, overrides, defaults)


def _report(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True))


def run(args: argparse.Namespace) -> None:
    if args.command == "gen-synthetic":
        frame = gen_synthetic(args.n, args.margin, args.seed, args.dim, args.variant, args.out)
        _report({"success": True, "rows": len(frame), "output": args.out})
        return
    if args.command == "evaluate":
        result = evaluate_checkpoint(args.run, args.dataset, args.scheme, args.text_column,
                                     args.label_column, args.out, args.keep_negations)
        _report({"success": True, "accuracy": result.summary.accuracy, "output": str(result.output_dir)})
        return

    cfg = config_from_args(args)
    if args.command == "preprocess":
        output = preprocess_dataset(cfg)
        _report({"success": True, "output": str(output)})
        return
    result = run_noise_sweep(cfg) if args.command == "noise-sweep" else run_experiment(cfg)
    _report({
        "success": True,
        "model": result.model_name,
        "accuracy": result.summary.accuracy,
        "auc": result.roc.auc if result.roc is not None else None,
        "output": str(result.output_dir),
    })


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        run(args)
    except QfuzzError as e:
        logger.error(f"❌ {e.code}: {e.message}")
        print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception("Unexpected failure")
        print(json.dumps({"success": False, "error": "internal-error", "message": str(e), "details": None},
                         sort_keys=True), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
