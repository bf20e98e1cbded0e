"""
Command-line entry point: ``python -m ecoattn <subcommand>``.

Artifacts go to stdout (or ``--output``); logs go to stderr. Exit codes:
0 on success, 1 when a gradcheck or equivalence contract fails, 2 on usage
or input errors.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from ecoattn import __version__
from ecoattn.accounting import reduction_report, reduction_sweep
from ecoattn.attention import AttentionSpec, ScoreKind, attention_forward, dot_equivalence_check, kernel_curves, parse_kind
from ecoattn.config import EcoAttnConfig
from ecoattn.exceptions import EcoAttnError
from ecoattn.grad import gradcheck_attention
from ecoattn.sparse import (
    WindowSpec,
    identity_projection,
    linformer_l1_forward,
    longformer_l1_forward,
    parse_global_indices,
    random_projection,
)
from ecoattn.tensor import Rng, format_matrix, rand_matrix, read_matrix
from ecoattn.training import SyntheticTask, epoch_lines, lambda_grid_search, summary_frame, train
from ecoattn.utils.logging import get_logger, set_level

logger = get_logger(__name__)

EXIT_OK, EXIT_CONTRACT, EXIT_USAGE = 0, 1, 2


def _float_list(text: str) -> List[float]:
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _kind(text: str) -> ScoreKind:
    try:
        return parse_kind(text)
    except EcoAttnError as e:
        raise argparse.ArgumentTypeError(str(e))


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def emit(text: str, output: Optional[str]) -> None:
    """Write an artifact to ``output`` or stdout."""
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed (falls back to ECOATTN_SEED)")
    common.add_argument("--output", default=None, help="Write the artifact here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="Output format")
    common.add_argument("--config", default=None, help="YAML file overriding config/ecoattn.yaml defaults")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(prog="ecoattn", description="Distance-based attention toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    curves = sub.add_parser("curves", parents=[common], help="Gaussian and Laplacian kernel curves")
    curves.add_argument("--dk", type=int, default=None)
    curves.add_argument("--lambda", dest="lambdas", type=_float_list, default=None)
    curves.add_argument("--dmax", type=float, default=None)
    curves.add_argument("--steps", type=int, default=None)

    opcount = sub.add_parser("opcount", parents=[common], help="Dot-product versus L1 energy report")
    opcount.add_argument("--n", type=_int_list, required=True)
    opcount.add_argument("--dk", type=_int_list, required=True)
    opcount.add_argument("--full-layer", action="store_true")
    opcount.add_argument("--heads", type=int, default=1)
    opcount.add_argument("--layers", type=int, default=1)
    opcount.add_argument("--attention-share", type=float, default=None)

    gradcheck = sub.add_parser("gradcheck", parents=[common], help="Analytic gradients versus central differences")
    gradcheck.add_argument("--kind", type=_kind, required=True)
    gradcheck.add_argument("--lambda", dest="lam", type=float, default=1.0)
    gradcheck.add_argument("--p", type=float, default=2.0)
    gradcheck.add_argument("--n", type=int, default=6)
    gradcheck.add_argument("--dk", type=int, default=8)
    gradcheck.add_argument("--step", type=float, default=None)

    attn = sub.add_parser("attn", parents=[common], help="Attention on fixture matrices")
    attn.add_argument("--kind", type=_kind, default=ScoreKind.L1)
    attn.add_argument("--variant", choices=["dense", "longformer", "linformer"], default="dense")
    attn.add_argument("--q", required=True)
    attn.add_argument("--k", required=True)
    attn.add_argument("--v", required=True)
    attn.add_argument("--lambda", dest="lam", type=float, default=1.0)
    attn.add_argument("--p", type=float, default=2.0)
    attn.add_argument("--window", type=int, default=2)
    attn.add_argument("--global", dest="global_indices", default="")
    attn.add_argument("--proj-k", type=int, default=None)

    train_cmd = sub.add_parser("train", parents=[common], help="Train the toy transformer")
    train_cmd.add_argument("--task", required=True)
    train_cmd.add_argument("--kind", type=_kind, required=True)
    train_cmd.add_argument("--lambda", dest="lam", type=float, default=None)
    train_cmd.add_argument("--lambda-grid", type=_float_list, default=None)
    train_cmd.add_argument("--epochs", type=int, default=None)
    train_cmd.add_argument("--samples", type=int, default=None)
    train_cmd.add_argument("--lr", type=float, default=None)
    train_cmd.add_argument("--output-dir", default=None)

    equiv = sub.add_parser("equiv", parents=[common], help="Dot-product / squared-L2 equivalence on unit rows")
    equiv.add_argument("--n", type=int, default=6)
    equiv.add_argument("--dk", type=int, default=8)

    return parser


def run_curves(args, config: EcoAttnConfig) -> int:
    defaults = config.get_section("curves")
    frame = kernel_curves(
        args.dk if args.dk is not None else defaults["d_k"],
        args.lambdas if args.lambdas is not None else defaults["lambdas"],
        args.dmax if args.dmax is not None else defaults["d_max"],
        args.steps if args.steps is not None else defaults["steps"],
    )
    if args.format == "json":
        emit(frame.to_json(orient="records") + "\n", args.output)
    else:
        emit(frame_to_csv(frame), args.output)
    return EXIT_OK


def run_opcount(args, config: EcoAttnConfig) -> int:
    model = config.energy_model()
    single = len(args.n) == 1 and len(args.dk) == 1
    if args.format == "csv" or (not single and args.format is None):
        frame = reduction_sweep(args.n, args.dk, model, full_layer=args.full_layer)
        emit(frame_to_csv(frame), args.output)
        return EXIT_OK

    reports = [
        reduction_report(
            n, d_k, model,
            full_layer=args.full_layer,
            heads=args.heads,
            layers=args.layers,
            attention_share=args.attention_share,
        )
        for n in args.n
        for d_k in args.dk
    ]
    payload = [report.model_dump(mode="json") for report in reports]
    emit(json.dumps(payload[0] if single else payload, indent=2) + "\n", args.output)
    return EXIT_OK


def run_gradcheck(args, config: EcoAttnConfig, seed: int) -> int:
    settings = config.get_section("gradcheck")
    spec = AttentionSpec(args.kind, args.lam, args.dk, p=args.p)
    report = gradcheck_attention(
        spec, args.n, seed,
        step=args.step if args.step is not None else settings["step"],
        gap=settings["kink_gap"],
    )
    emit(report.model_dump_json(indent=2, by_alias=True) + "\n", args.output)
    if report.max_rel_err >= settings["max_rel_err"]:
        logger.error(f"Gradient check failed: max_rel_err={report.max_rel_err:.3e} at {report.worst_coordinate}")
        return EXIT_CONTRACT
    return EXIT_OK


def run_attn(args, seed: int) -> int:
    q = read_matrix(args.q)
    k = read_matrix(args.k)
    v = read_matrix(args.v)
    spec = AttentionSpec(args.kind, args.lam, q.shape[1], p=args.p)

    if args.variant == "dense":
        output, _ = attention_forward(spec, q, k, v)
    elif args.variant == "longformer":
        win = WindowSpec(args.window, parse_global_indices(args.global_indices))
        output = longformer_l1_forward(spec, win, q, k, v)
    else:
        n = k.shape[0]
        proj = identity_projection(n) if args.proj_k is None else random_projection(Rng(seed), args.proj_k, n)
        output = linformer_l1_forward(spec, proj, q, k, v)

    emit(format_matrix(output), args.output)
    return EXIT_OK


def run_train(args, config: EcoAttnConfig, seed: int) -> int:
    train_config = config.train_config(
        attention_kind=args.kind,
        lam=args.lam,
        lambda_grid=args.lambda_grid,
        epochs=args.epochs,
        samples=args.samples,
        lr=args.lr,
        seed=seed,
    )
    task = SyntheticTask(
        kind=args.task,
        seq_len=train_config.seq_len,
        vocab=train_config.vocab,
        classes=train_config.classes,
        seed=seed,
    )

    # a fixed lambda (or dot-product scores) means one run; otherwise sweep the grid
    if args.kind is ScoreKind.DOT_PRODUCT or args.lam is not None:
        results = [train(train_config, task)]
    else:
        results = lambda_grid_search(train_config, task)

    jsonl = "".join(line + "\n" for line in epoch_lines(results))
    summary = frame_to_csv(summary_frame(results))
    if args.output_dir:
        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "epochs.jsonl").write_text(jsonl)
        (out_dir / "summary.csv").write_text(summary)
        logger.info(f"Wrote {out_dir / 'epochs.jsonl'} and {out_dir / 'summary.csv'}")
    else:
        emit(jsonl + summary, args.output)
    return EXIT_OK


def run_equiv(args, config: EcoAttnConfig, seed: int) -> int:
    settings = config.get_section("equivalence")
    rng = Rng(seed)
    q = rand_matrix(rng, args.n, args.dk, 1.0)
    k = rand_matrix(rng, args.n, args.dk, 1.0)
    v = rand_matrix(rng, args.n, args.dk, 1.0)
    deviation = dot_equivalence_check(q, k, v, settings["lambda"])

    if args.format == "json":
        payload = {"n": args.n, "d_k": args.dk, "seed": seed, "max_deviation": deviation}
        emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        emit(f"{deviation!r}\n", args.output)

    if deviation >= settings["max_deviation"]:
        logger.error(f"Equivalence check failed: deviation {deviation:.3e}")
        return EXIT_CONTRACT
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        if args.log_level:
            set_level(args.log_level)
        config = EcoAttnConfig(args.config)
        seed = args.seed if args.seed is not None else config.default_seed()

        if args.command == "curves":
            return run_curves(args, config)
        if args.command == "opcount":
            return run_opcount(args, config)
        if args.command == "gradcheck":
            return run_gradcheck(args, config, seed)
        if args.command == "attn":
            return run_attn(args, seed)
        if args.command == "train":
            return run_train(args, config, seed)
        return run_equiv(args, config, seed)
    except (EcoAttnError, ValueError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
