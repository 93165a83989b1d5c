"""Command-line interface.

Exit codes: 0 success (or condition true), 1 condition false / invalid
algebra, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from carnot import catalog
from carnot.conditions import (
    check_abnormal_line,
    check_reg,
    check_sbh,
    classify_many,
    find_sbh_witness,
    is_metivier,
    sample_vectors,
)
from carnot.endpoint import PiecewiseConstantControl, endpoint
from carnot.group import bch
from carnot.lie_algebra import (
    StratifiedAlgebra,
    format_vector,
    validate,
    vector_json,
)
from carnot.probe import ProbeConfig, probe_h

log = logging.getLogger("carnot")

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class CliConfig:
    subcommand: str
    catalog_name: str | None = None
    path: str | None = None
    vector: str | None = None
    sample: int | None = None
    seed: int = 0
    p: int | None = None
    eta: float = 0.1
    resolution: int = 2
    output: str = "text"
    verbosity: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> CliConfig:
        return cls(
            subcommand=args.command,
            catalog_name=getattr(args, "catalog", None),
            path=getattr(args, "file", None),
            vector=getattr(args, "vector", None),
            sample=getattr(args, "sample", None),
            seed=getattr(args, "seed", 0),
            p=getattr(args, "p", None),
            eta=getattr(args, "eta", 0.1),
            resolution=getattr(args, "resolution", 2),
            output=args.format,
            verbosity=args.verbose,
        )


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def parse_vector(text: str) -> list[Fraction]:
    parts = [t for t in text.replace(" ", "").split(",") if t]
    if not parts:
        raise InputError("empty vector")
    return [parse_rational(t) for t in parts]


def horizontal_arg(alg: StratifiedAlgebra, text: str):
    """Accept either first-layer coordinates or a full horizontal vector."""
    vals = parse_vector(text)
    if len(vals) == alg.horizontal_dim:
        return alg.horizontal(vals)
    if len(vals) == alg.dim:
        if any(vals[alg.horizontal_dim :]):
            raise InputError(f"vector {text!r} is not horizontal")
        return tuple(vals)
    raise InputError(f"expected {alg.horizontal_dim} (horizontal) or {alg.dim} coordinates, got {len(vals)}")


def full_arg(alg: StratifiedAlgebra, text: str):
    vals = parse_vector(text)
    if len(vals) != alg.dim:
        raise InputError(f"expected {alg.dim} coordinates, got {len(vals)}")
    return tuple(vals)


def load_algebra(cfg: CliConfig) -> StratifiedAlgebra:
    try:
        if cfg.path is not None:
            return catalog.from_file(cfg.path)
        return catalog.get(cfg.catalog_name)
    except catalog.AlgebraFileError as exc:
        raise InputError(str(exc)) from exc
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc
    except OSError as exc:
        raise InputError(f"cannot read {cfg.path}: {exc.strerror}") from exc


def emit(cfg: CliConfig, payload: dict, text: str) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_validate(cfg: CliConfig) -> int:
    if cfg.path is not None:
        try:
            alg = catalog.from_file(cfg.path, check=False)
        except catalog.AlgebraFileError as exc:
            raise InputError(str(exc)) from exc
    else:
        alg = load_algebra(cfg)
    report = validate(alg)
    lines = [f"{alg.name or cfg.path}: {'valid' if report.ok else 'INVALID'}"]
    lines += [f"  {v}" for v in report.violations]
    emit(cfg, report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FALSE


def _report_text(rep) -> str:
    sbh = f"holds (p={rep.sbh.witness_p})" if rep.sbh.holds else f"fails for p <= {rep.sbh.search_cap}"
    h = rep.h.status + (f" score={rep.h.score:.4f}" if rep.h.score is not None else "")
    implied = ", ".join(f"{k}={v.status}" for k, v in rep.implied.items())
    return (
        f"X={format_vector(rep.vector)}  reg={rep.reg}  sbh={sbh}  abnormal_line={rep.abnormal_line}\n"
        f"  H: {h} ({rep.h.reason})\n"
        f"  {implied}"
    )


def cmd_classify(args: argparse.Namespace, cfg: CliConfig) -> int:
    alg = load_algebra(cfg)
    if (cfg.vector is None) == (cfg.sample is None):
        raise InputError("give exactly one of --vector or --sample")
    if cfg.vector is not None:
        vectors = [horizontal_arg(alg, cfg.vector)]
    else:
        if cfg.sample < 1:
            raise InputError("--sample must be positive")
        vectors = sample_vectors(alg, cfg.sample, cfg.seed)
    probe = None
    if args.probe:
        probe = ProbeConfig(p=cfg.p or 2, eta=cfg.eta, resolution=cfg.resolution, seed=cfg.seed)
    reports = classify_many(alg, vectors, probe, workers=args.workers)
    payload = {"algebra": alg.name, "seed": cfg.seed if cfg.sample else None, "reports": [r.to_dict() for r in reports]}
    emit(cfg, payload, "\n".join(_report_text(r) for r in reports))
    return EXIT_OK


def cmd_check(args: argparse.Namespace, cfg: CliConfig) -> int:
    alg = load_algebra(cfg)
    x = horizontal_arg(alg, cfg.vector)
    witness = None
    if args.condition == "reg":
        verdict = check_reg(alg, x)
    elif args.condition == "abnormal":
        verdict = check_abnormal_line(alg, x)
    elif cfg.p is not None:
        if cfg.p < 1:
            raise InputError("--p must be positive")
        verdict = check_sbh(alg, x, cfg.p)
        witness = cfg.p if verdict else None
    else:
        witness = find_sbh_witness(alg, x)
        verdict = witness is not None
    payload = {
        "algebra": alg.name,
        "vector": vector_json(x),
        "condition": args.condition,
        "p": cfg.p,
        "holds": verdict,
        "witness_p": witness,
    }
    text = f"{args.condition}({format_vector(x)}) = {str(verdict).lower()}"
    if witness is not None:
        text += f" (p={witness})"
    emit(cfg, payload, text)
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_bch(args: argparse.Namespace, cfg: CliConfig) -> int:
    alg = load_algebra(cfg)
    x, y = full_arg(alg, args.x), full_arg(alg, args.y)
    z = bch(alg, x, y)
    emit(cfg, {"algebra": alg.name, "x": vector_json(x), "y": vector_json(y), "bch": vector_json(z)}, format_vector(z))
    return EXIT_OK


def parse_control(alg: StratifiedAlgebra, text: str) -> PiecewiseConstantControl:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"control JSON, line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, list) or not data:
        raise InputError("control must be a non-empty JSON array of {until, value}")
    pieces = []
    for i, piece in enumerate(data):
        try:
            until, value = piece["until"], piece["value"]
        except (TypeError, KeyError) as exc:
            raise InputError(f"control[{i}]: expected keys 'until' and 'value'") from exc
        pieces.append((_json_rational(until), [_json_rational(v) for v in value]))
    try:
        return PiecewiseConstantControl.from_pieces(alg, pieces)
    except ValueError as exc:
        raise InputError(f"control: {exc}") from exc


def _json_rational(v) -> Fraction:
    if isinstance(v, dict):
        return Fraction(int(v["num"]), int(v.get("den", 1)))
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return parse_rational(str(v))
    raise InputError(f"not an exact rational: {v!r} (use an integer, \"num/den\" or {{num, den}})")


def cmd_endpoint(args: argparse.Namespace, cfg: CliConfig) -> int:
    alg = load_algebra(cfg)
    x = horizontal_arg(alg, args.base) if args.base else alg.zero()
    control = parse_control(alg, args.control)
    g = endpoint(x, control)
    payload = {"algebra": alg.name, "base": vector_json(x), "control": control.to_json(), "endpoint": vector_json(g.log_coords)}
    emit(cfg, payload, format_vector(g.log_coords))
    return EXIT_OK


def cmd_probe(args: argparse.Namespace, cfg: CliConfig) -> int:
    alg = load_algebra(cfg)
    x = horizontal_arg(alg, cfg.vector)
    config = ProbeConfig(
        p=cfg.p or 2,
        eta=cfg.eta,
        resolution=cfg.resolution,
        box=args.box,
        samples=args.samples,
        seed=cfg.seed,
    )
    try:
        result = probe_h(alg, x, config)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {"algebra": alg.name, "vector": vector_json(x), "p": config.p, "eta": config.eta, **result.to_dict()}
    text = (
        f"probe score {result.score:.4f} ({result.covered}/{result.cells} cells, box radius {result.box:g}); "
        f"{result.label}"
    )
    emit(cfg, payload, text)
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace, cfg: CliConfig) -> int:
    if args.action == "list":
        entries = [catalog.CATALOG[name].metadata() for name in sorted(catalog.CATALOG)]
        text = "\n".join(f"{e['name']:<20} dims={e['layer_dims']}  {e['description']}" for e in entries)
        emit(cfg, {"algebras": entries}, text)
        return EXIT_OK
    if not args.name or args.name not in catalog.CATALOG:
        raise InputError(f"unknown catalog algebra {args.name!r}")
    entry = catalog.CATALOG[args.name]
    meta = entry.metadata()
    alg = entry.build()
    if alg.step == 2:
        meta["metivier_check"] = is_metivier(alg).to_dict()
    text = "\n".join(f"{k}: {v}" for k, v in meta.items())
    emit(cfg, meta, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carnot", description="Exact regularity checks for Carnot groups.")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_source(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--catalog", help="built-in algebra name (see `carnot catalog list`)")
        src.add_argument("--file", help="structure-constant JSON file")
        return p

    with_source(sub.add_parser("validate", help="check the Carnot-algebra invariants"))

    p = with_source(sub.add_parser("classify", help="condition report for horizontal directions"))
    p.add_argument("--vector", help="comma-separated rationals, e.g. 1,0 or 1/2,3")
    p.add_argument("--sample", type=int, help="classify k seeded random directions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--probe", action="store_true", help="run the openness probe where (H) is unknown")
    p.add_argument("--p", type=int)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--resolution", type=int, default=2)

    p = with_source(sub.add_parser("check", help="decide one condition"))
    p.add_argument("--vector", required=True)
    p.add_argument("--condition", choices=("reg", "sbh", "abnormal"), required=True)
    p.add_argument("--p", type=int, help="fixed p for sbh; omitted means search for the least p")

    p = with_source(sub.add_parser("bch", help="log(exp(x) exp(y))"))
    p.add_argument("x")
    p.add_argument("y")

    p = with_source(sub.add_parser("endpoint", help="endpoint of a piecewise-constant control"))
    p.add_argument("--base", help="horizontal base vector X (default 0)")
    p.add_argument("--control", required=True, help='JSON [{"until": "1/2", "value": [1, 0]}, ...] or @file')

    p = with_source(sub.add_parser("probe", help="heuristic openness probe for (H)"))
    p.add_argument("--vector", required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--resolution", type=int, default=2)
    p.add_argument("--box", type=float)
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("catalog", help="list or show built-in algebras")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = CliConfig.from_args(args)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(levelname)s %(message)s")
    log.debug("config %s", cfg)
    handlers = {
        "validate": lambda: cmd_validate(cfg),
        "classify": lambda: cmd_classify(args, cfg),
        "check": lambda: cmd_check(args, cfg),
        "bch": lambda: cmd_bch(args, cfg),
        "endpoint": lambda: cmd_endpoint(args, cfg),
        "probe": lambda: cmd_probe(args, cfg),
        "catalog": lambda: cmd_catalog(args, cfg),
    }
    try:
        return handlers[args.command]()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
