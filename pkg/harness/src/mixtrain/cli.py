"""Command-line surface: validate a sweep config, run it, analyze results.

Exit codes: 0 success, 1 incomplete results (analysis), 2 bad
configuration or arguments, 3 nothing could be trained.  Errors are
emitted as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mixtrain import analyze as amod
from mixtrain import config as cmod
from mixtrain import train as tmod
from mixtrain.errors import ConfigurationError, DatasetMissing, MissingCells


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _fail(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixtrain")
    sub = parser.add_subparsers(dest="command", required=True)

    val = sub.add_parser("validate", help="check a sweep config against the selection law")
    val.add_argument("--config", required=True)

    run = sub.add_parser("run", help="train sweep cells and append rows to a results CSV")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="results CSV path (appended to)")
    run.add_argument("--data-root", default=None)
    run.add_argument("--download", action="store_true", help="fetch the dataset if absent")
    run.add_argument("--desk", action="store_true", help="desk preset: two budgets, 3 seeds, 20 epochs")
    run.add_argument("--epochs", type=int, default=None, help="override the configured epoch count")
    run.add_argument("--device", default=None)
    run.add_argument("--sigma2", action="store_true", help="squaring activation instead of the smooth one")
    run.add_argument("--plain", action="store_true", help="disable per-layer norm and residuals")
    run.add_argument("--limit", type=int, default=None, help="run only the first N cells")
    run.add_argument("--synthetic", action="store_true", help="train on synthetic images (no dataset needed)")
    run.add_argument("--classes", type=int, default=10, help="class count for synthetic mode")
    run.add_argument("--train-size", type=int, default=2048)
    run.add_argument("--test-size", type=int, default=512)

    ana = sub.add_parser("analyze", help="reduce a results CSV to per-budget verdicts")
    ana.add_argument("--results", required=True)
    ana.add_argument("--out", default=None)
    ana.add_argument("--flag-threshold", type=float, default=amod.FLAG_THRESHOLD)
    return parser


def _synthetic_factory(args: argparse.Namespace) -> tmod.DatasetFactory:
    def factory(cell: cmod.SweepCell, hyper: cmod.Hyperparameters):
        train = tmod.SyntheticImages(args.train_size, args.classes, seed=17)
        test = tmod.SyntheticImages(args.test_size, args.classes, seed=18)
        return train, test, args.classes

    return factory


def _cmd_validate(args: argparse.Namespace) -> int:
    config = cmod.load_config(args.config)
    cmod.validate_cells(config)
    print(json.dumps({"cells": len(config.cells), "status": "ok"}))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = cmod.load_config(args.config)
    cmod.validate_cells(config)
    if args.desk:
        config = cmod.desk_preset(config)
    if args.limit is not None:
        config = cmod.SweepConfig(cells=config.cells[: args.limit], hyperparameters=config.hyperparameters)
    if not args.synthetic and args.data_root is None:
        raise ConfigurationError("either --data-root or --synthetic is required")
    factory = _synthetic_factory(args) if args.synthetic else None
    results, failures = tmod.run_sweep(
        config,
        out_csv=args.out,
        data_root=args.data_root,
        epochs=args.epochs,
        device=args.device,
        sigma2=args.sigma2,
        norm=not args.plain,
        residual=not args.plain,
        download=args.download,
        dataset_factory=factory,
        progress=lambda line: print(line, file=sys.stderr),
    )
    summary = {
        "out": args.out,
        "results": len(results),
        "errors": [
            {"budget": c.budget, "ratio": c.ratio, "seed": c.seed, "error": msg} for c, msg in failures
        ],
    }
    print(json.dumps(summary, sort_keys=True))
    return 0 if results else 3


def _cmd_analyze(args: argparse.Namespace) -> int:
    verdicts = amod.analyze_sweep(args.results, flag_threshold=args.flag_threshold)
    _emit(amod.verdicts_to_json(verdicts), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_analyze(args)
    except ConfigurationError as exc:
        return _fail(2, exc)
    except MissingCells as exc:
        return _fail(1, exc)
    except DatasetMissing as exc:
        return _fail(3, exc)
    except OSError as exc:
        return _fail(2, exc)


if __name__ == "__main__":
    sys.exit(main())
