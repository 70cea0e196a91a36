"""Command line front end.

Subcommands: generate, verify, recover, cayley, radon.  Output is either
human-readable text or a single structured JSON document per run
(--format structured).  Exit codes are part of the contract:

    0  success (verify: tensor is Osserman)
    1  verify: not Osserman / recover: dimension hypotheses violated
    2  generate: requested generators exceed the Radon bound
    3  generate: invalid eigenvalue list
    4  unreadable or invalid input file
    5  recover: obstruction detected (forced run hit a persistent failure)
    6  recover: numerical stage failure (stage named in the message)
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import serialize
from .cayley import cayley_tensor, cayley_jacobi, obstruction_nullspace
from .clifford import (
    CliffordSystem,
    curvature_from_clifford,
    generate_hurwitz_family,
    radon_number,
    system_profile,
)
from .errors import (
    ExceedsRadonBound,
    HypothesesViolated,
    InvalidSystem,
    InvalidTensor,
    ObstructionDetected,
    OssermanError,
    ShapeMismatch,
)
from .linalg import sample_unit_vector
from .recovery import RecoveryConfig, recover_clifford_traced
from .verify import duality_check, osserman_check


@dataclass(frozen=True)
class RunConfig:
    """Validated global options shared by all subcommands."""

    command: str
    input_path: str | None = None
    samples: int = 200
    rel_tol: float = 1e-9
    seed: int = 0
    format: str = "text"
    out: str | None = None
    force: bool = False

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("--samples must be at least 2")
        if self.rel_tol <= 0:
            raise ValueError("--tol must be positive")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, default=200, help="sample budget")
    parser.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed")
    parser.add_argument(
        "--format", choices=("text", "structured"), default="text",
        help="report style: human text or one JSON document",
    )
    parser.add_argument("--out", default=None, help="output path or path prefix")
    parser.add_argument(
        "--force", action="store_true",
        help="attempt recovery even when the dimension hypotheses fail",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osserman",
        description="Generate, verify and invert Clifford presentations of "
        "Osserman curvature tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a Clifford system and its tensor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--mu", default="", help="comma-separated eigenvalues, one per generator")
    _common(p)

    p = sub.add_parser("verify", help="run the Osserman and duality checks on a tensor file")
    p.add_argument("input", help="tensor file")
    _common(p)

    p = sub.add_parser("recover", help="recover a Clifford system from a tensor file")
    p.add_argument("input", help="tensor file")
    _common(p)

    p = sub.add_parser("cayley", help="Cayley plane: spectrum, tensor export, obstruction")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--emit-tensor", action="store_true", help="write the tensor file")
    p.add_argument("--obstruction", choices=("alpha", "alpha4"), default=None)
    _common(p)

    p = sub.add_parser("radon", help="print the Radon number")
    p.add_argument("n", type=int)
    _common(p)
    return parser


def _emit(doc: dict, cfg: RunConfig) -> None:
    if cfg.format == "structured":
        print(serialize.dumps_document(doc))
        return
    for key, value in doc.items():
        if key in ("schema_version", "kind"):
            continue
        print(f"{key}: {value}")


def _report_lines(report, cfg: RunConfig) -> dict:
    doc = serialize.report_document(report)
    doc["command"] = cfg.command
    return doc


def cmd_generate(args, cfg: RunConfig) -> int:
    mu = [float(tok) for tok in args.mu.split(",") if tok.strip()] if args.mu else []
    if len(mu) != args.nu:
        print(
            f"error: expected {args.nu} eigenvalues, got {len(mu)}", file=sys.stderr
        )
        return 3
    try:
        family = generate_hurwitz_family(args.n, args.nu)
    except ExceedsRadonBound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        system = CliffordSystem(
            args.n,
            args.lambda0,
            np.asarray(mu),
            np.stack(family) if family else np.zeros((0, args.n, args.n)),
        )
    except InvalidSystem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    tensor = curvature_from_clifford(system)
    prefix = cfg.out or f"cliff_{args.n}_{args.nu}"
    tensor_path = f"{prefix}.tensor.json"
    system_path = f"{prefix}.system.json"
    serialize.save_tensor(tensor, tensor_path)
    serialize.save_system(system, system_path)
    _emit(
        {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "generate_summary",
            "command": "generate",
            "n": args.n,
            "nu": args.nu,
            "lambda0": args.lambda0,
            "profile": [[v, m] for v, m in system_profile(system)],
            "tensor_file": tensor_path,
            "system_file": system_path,
        },
        cfg,
    )
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        tensor = serialize.load_tensor(args.input)
    except (OSError, ValueError, ShapeMismatch, InvalidTensor) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    report = osserman_check(tensor, cfg.samples, cfg.rel_tol, cfg.seed)
    doc = _report_lines(report, cfg)
    duality = duality_check(tensor, cfg.samples, cfg.rel_tol, cfg.seed)
    doc["duality_max_residual"] = duality.max_residual
    doc["duality_violations"] = len(duality.violations)
    _emit(doc, cfg)
    return 0 if report.is_osserman else 1


def cmd_recover(args, cfg: RunConfig) -> int:
    try:
        tensor = serialize.load_tensor(args.input)
    except (OSError, ValueError, ShapeMismatch, InvalidTensor) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    config = RecoveryConfig(
        samples=cfg.samples,
        cluster_rel_tol=cfg.rel_tol,
        seed=cfg.seed,
        force=cfg.force,
    )
    try:
        system, trace = recover_clifford_traced(tensor, config)
    except HypothesesViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ObstructionDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except OssermanError as exc:
        stage = exc.stage or "unknown"
        print(f"error at stage '{stage}': {exc}", file=sys.stderr)
        return 6
    prefix = cfg.out or "recovered"
    system_path = f"{prefix}.system.json"
    trace_path = f"{prefix}.trace.json"
    serialize.save_system(system, system_path)
    serialize.write_document(serialize.trace_document(trace), trace_path)
    final = trace[-1].info
    _emit(
        {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "recovery_summary",
            "command": "recover",
            "nu": system.nu,
            "lambda0": system.lambda0,
            "mu": [float(v) for v in system.mu],
            "rebuild_residual": final["rebuild_residual"],
            "system_file": system_path,
            "trace_file": trace_path,
        },
        cfg,
    )
    return 0


def cmd_cayley(args, cfg: RunConfig) -> int:
    if args.obstruction is not None:
        dim = obstruction_nullspace(
            args.obstruction, max(cfg.samples, 32), max(cfg.rel_tol, 1e-8), cfg.seed
        )
        _emit(
            {
                "schema_version": serialize.SCHEMA_VERSION,
                "kind": "cayley_obstruction",
                "command": "cayley",
                "eigenspace": args.obstruction,
                "nullspace_dimension": dim,
            },
            cfg,
        )
        return 0
    rng = np.random.default_rng(cfg.seed)
    spectra = []
    for _ in range(min(cfg.samples, 64)):
        x = sample_unit_vector(rng, 16)
        w = np.linalg.eigvalsh(cayley_jacobi(x, args.alpha).entries)
        spectra.append(np.sort(w))
    spectra = np.asarray(spectra)
    deviation = float(np.max(spectra.max(axis=0) - spectra.min(axis=0)))
    doc = {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "cayley_summary",
        "command": "cayley",
        "alpha": args.alpha,
        "profile": [[args.alpha / 4.0, 8], [args.alpha, 7]],
        "spectrum_deviation": deviation,
    }
    if args.emit_tensor:
        path = cfg.out or "cayley.tensor.json"
        serialize.save_tensor(cayley_tensor(args.alpha), path)
        doc["tensor_file"] = path
    _emit(doc, cfg)
    return 0


def cmd_radon(args, cfg: RunConfig) -> int:
    value = radon_number(args.n)
    if cfg.format == "structured":
        _emit(
            {
                "schema_version": serialize.SCHEMA_VERSION,
                "kind": "radon_number",
                "command": "radon",
                "n": args.n,
                "rho": value,
            },
            cfg,
        )
    else:
        print(value)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        samples=args.samples,
        rel_tol=args.tol,
        seed=args.seed,
        format=args.format,
        out=args.out,
        force=args.force,
    )
    handlers = {
        "generate": cmd_generate,
        "verify": cmd_verify,
        "recover": cmd_recover,
        "cayley": cmd_cayley,
        "radon": cmd_radon,
    }
    return handlers[cfg.command](args, cfg)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
