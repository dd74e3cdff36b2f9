"""Command-line front end.

Commands are grouped as ``design``, ``entangle``, ``jordan`` and ``bloch``.
Every leaf command takes ``--seed``, ``--tol``, ``-o/--output``, ``--format``
and ``--quiet``. Status lines go to stdout, errors to stderr. Reports are only
written when ``-o`` is given (``-o -`` renders the report on stdout instead).

Exit codes: 0 pass, 1 verification failure, 2 usage or parameter error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from qjw.bloch import BlochGeometry, bloch_gram, regular_simplex, simplex_gram
from qjw.composites import (
    UNIVERSAL_CASES,
    UNIVERSAL_EXPECTED,
    compact_structure,
    tensor_cell,
    tensor_table,
    universal_envelope,
    universal_tensor_smallcase,
)
from qjw.config import (
    DEFAULT_SEED,
    TOL_CONCURRENCE,
    TOL_DESIGN,
    VERSION,
    WORD_SAMPLES,
    ClosureCapExceeded,
    ExceptionalFactorError,
    IdentificationError,
    ReconstructionError,
    default_tolerance,
)
from qjw.designs import (
    ConicalDesign,
    build_mub,
    build_mum,
    build_sic,
    build_sim,
    design_from_ops,
    design_to_json,
    verify_design,
)
from qjw.entanglement import (
    concurrence_table,
    isotropic_state,
    werner_from_design,
    werner_state,
    witness_tests,
    witnesses_from_design,
)
from qjw.involutions import DirectSumOf, Involution, SwapTranspose, Symplectic, Transpose
from qjw.jordan import EjaDescriptor, check_reversible, parse_descriptor, standard_embedding
from qjw.linalg import make_rng, matrix_from_json
from qjw.report import FORMATS, infer_format, read_json, render_csv, render_json, report_meta, write_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

DESIGN_KINDS = ("sim", "mum", "sic", "mub")
STATES = ("werner", "isotropic", "maxmixed")
COMPACT_INVOLUTIONS = ("auto", "transpose", "symplectic", "swap", "none")
# ambient matrix size allowed for envelope closures under --long
LONG_AMBIENT = 64

_COMMON = ("group", "action", "handler", "seed", "tol", "output", "format", "quiet", "long")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    seed: int = DEFAULT_SEED
    tolerance: float = TOL_DESIGN
    output: Path | None = None
    fmt: str | None = None
    long: bool = False
    quiet: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        tolerance = args.tol if args.tol is not None else default_tolerance()
        if not tolerance > 0.0:
            raise ValueError(f"--tol must be positive, got {tolerance}")
        params = {
            k: str(v) if isinstance(v, Path) else v for k, v in vars(args).items() if k not in _COMMON
        }
        return cls(
            command=f"{args.group} {args.action}",
            params=params,
            seed=int(args.seed),
            tolerance=float(tolerance),
            output=None if args.output is None else Path(args.output),
            fmt=args.format,
            long=bool(getattr(args, "long", False)),
            quiet=bool(args.quiet),
        )


@dataclass
class Outcome:
    results: list[dict]
    ok: bool = True
    lines: list[str] = field(default_factory=list)


def _flag(value: bool) -> str:
    return "true" if value else "false"


def build_design(kind: str, d: int, kappa: float | None = None, eta: float | None = None, seed: int = 0) -> ConicalDesign:
    """Design of the requested family; SIC and MUB projectors are rescaled to a POVM."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if kind == "sim":
        return build_sim(d, 1.0 / (d - 1) if kappa is None else kappa, seed)
    if kind == "mum":
        return build_mum(d, 1.0 / (d - 1) if eta is None else eta, seed)
    if kind == "sic":
        return design_from_ops([p / d for p in build_sic(d)])
    if kind == "mub":
        return design_from_ops([p / (d + 1) for p in build_mub(d)])
    raise ValueError(f"unknown design kind {kind!r}; expected one of {DESIGN_KINDS}")


def cmd_design_build(cfg: RunConfig) -> Outcome:
    p = cfg.params
    design = build_design(p["kind"], p["d"], p["kappa"], p["eta"], cfg.seed)
    report = verify_design(design.ops, cfg.tolerance, cfg.seed)
    fit = werner_from_design(design)
    result = {
        "kind": p["kind"],
        "design": design_to_json(design),
        "verification": report.as_dict(),
        "werner": {"p": fit.p, "residual": fit.residual, "decomposable": fit.decomposable},
    }
    lines = [
        f"{p['kind']} d={design.d} n={design.n}: ks={design.k_s:.12g} ka={design.k_a:.12g} kappa={design.kappa:.12g}",
        f"verification: {'pass' if report.ok else 'FAIL'}",
    ]
    return Outcome([result], report.ok, lines)


def _design_payload(obj) -> dict:
    """Bare design JSON, or the first design inside a ``design build`` report."""
    if isinstance(obj, dict) and "ops" in obj:
        return obj
    if isinstance(obj, dict) and isinstance(obj.get("results"), list):
        for row in obj["results"]:
            if isinstance(row, dict) and isinstance(row.get("design"), dict):
                return row["design"]
    raise ValueError("file holds neither a design nor a design report")


def cmd_design_verify(cfg: RunConfig) -> Outcome:
    path = Path(cfg.params["file"])
    payload = _design_payload(read_json(path))
    try:
        d = int(payload["d"])
        ops = [matrix_from_json(m) for m in payload["ops"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: design JSON needs d and ops") from exc
    for a in ops:
        if a.shape != (d, d):
            raise ValueError(f"{path}: design declares d={d} but holds a {a.shape} operator")
    report = verify_design(ops, cfg.tolerance, cfg.seed)
    result = report.as_dict()
    ok = report.ok
    stored = payload.get("constants")
    if isinstance(stored, dict) and "ks" in stored and "ka" in stored:
        scale = max(abs(report.k_s), 1e-300)
        gap = max(abs(float(stored["ks"]) - report.k_s), abs(float(stored["ka"]) - report.k_a)) / scale
        result["stored_constants_gap"] = gap
        ok = ok and gap <= cfg.tolerance
    lines = [f"{path}: d={report.d} n={report.n}"]
    for key in sorted(report.residuals):
        lines.append(f"  {key}: {report.residuals[key]:.3e} {'ok' if report.passed[key] else 'FAIL'}")
    lines.append(f"spanning: {_flag(report.spanning)}")
    lines.append(f"verification: {'pass' if ok else 'FAIL'}")
    return Outcome([result], ok, lines)


def cmd_entangle_table(cfg: RunConfig) -> Outcome:
    p = cfg.params
    design = build_design(p["design"], p["d"], p["kappa"], p["eta"], cfg.seed)
    rows = concurrence_table(
        design.ops,
        design.k_s,
        design.k_a,
        p["samples"],
        make_rng(cfg.seed),
        witnesses_from_design(design),
    )
    worst = max(r["delta"] for r in rows)
    ok = worst < TOL_CONCURRENCE
    lines = [f"states: {len(rows)} ({p['design']}, d={design.d})", f"max delta: {worst:.3e}"]
    return Outcome(rows, ok, lines)


def cmd_entangle_witness(cfg: RunConfig) -> Outcome:
    p = cfg.params
    d, state = p["d"], p["state"]
    kind = p["design"] or ("sic" if d in (2, 3) else "sim")
    design = build_design(kind, d, None, None, cfg.seed)
    if state == "werner":
        rho = werner_state(d, p["p"])
    elif state == "isotropic":
        rho = isotropic_state(d, p["p"])
    else:
        rho = np.eye(d * d, dtype=complex) / (d * d)
    wit = witnesses_from_design(design)
    verdicts = witness_tests(rho, wit, cfg.tolerance)
    result = {
        "state": state,
        "d": d,
        "p": None if state == "maxmixed" else p["p"],
        "design": kind,
        "s_minus": wit.s_minus,
        "s_plus": wit.s_plus,
        **verdicts.as_dict(),
    }
    lines = [f"{key}: {_flag(value)}" for key, value in sorted(verdicts.as_dict().items()) if isinstance(value, bool)]
    return Outcome([result], True, lines)


def cmd_jordan_tensor(cfg: RunConfig) -> Outcome:
    cell = tensor_cell(cfg.params["a"], cfg.params["b"], cfg.seed)
    line = (
        f"{cell.a} x {cell.b} -> {cell.computed}, dim {cell.computed_dim}, "
        f"rank {cell.computed_rank} [{cell.status}]"
    )
    return Outcome([cell.as_dict()], cell.status != "mismatch", [line])


def cmd_jordan_envelope(cfg: RunConfig) -> Outcome:
    desc = parse_descriptor(cfg.params["a"])
    limit = LONG_AMBIENT if cfg.long else 16
    env = universal_envelope(desc, verify=True, limit=limit)
    lines = [f"{desc.name} -> {env.name}", f"involution: {env.involution.label()}"]
    if env.computed_dim is None:
        lines.append(f"skipped: closure check (ambient {sum(env.blocks)} needs --long)")
    else:
        lines.append(f"complex dim: {env.computed_dim} (expected {env.expected_dim})")
    return Outcome([env.as_dict()], env.generated is not False, lines)


def cmd_jordan_reversible(cfg: RunConfig) -> Outcome:
    p = cfg.params
    desc = parse_descriptor(p["a"]) if p["a"] else EjaDescriptor.simple("Spin", p["spin"])
    res = check_reversible(standard_embedding(desc), p["maxlen"], cfg.seed, p["samples"])
    result = {
        "algebra": desc.name,
        "max_word_len": p["maxlen"],
        "reversible": res.reversible,
        "witness": res.witness_text,
        "words_checked": res.words_checked,
    }
    lines = [f"{desc.name} reversible: {_flag(res.reversible)}"]
    if res.witness is not None:
        lines.append(f"witness: {res.witness_text}")
    return Outcome([result], True, lines)


def cmd_jordan_table(cfg: RunConfig) -> Outcome:
    cells = tensor_table(include_long=cfg.long, seed=cfg.seed)
    lines = [f"{c.a} x {c.b}: {c.computed} [{c.status}]" for c in cells]
    bad = sum(c.status == "mismatch" for c in cells)
    lines.append(f"cells: {len(cells)}, mismatches: {bad}")
    return Outcome([c.as_dict() for c in cells], bad == 0, lines)


def compact_involution(blocks: tuple[int, ...], kind: str) -> Involution | None:
    if kind == "none":
        return None
    if kind == "auto":
        kind = "swap" if len(blocks) == 2 and blocks[0] == blocks[1] else "transpose"
    if kind == "swap":
        if len(blocks) != 2 or blocks[0] != blocks[1]:
            raise ValueError(f"swap involution needs two equal blocks, got {blocks}")
        return SwapTranspose(blocks[0])
    if kind == "symplectic":
        if any(b % 2 for b in blocks):
            raise ValueError(f"symplectic involution needs even blocks, got {blocks}")
        parts: list[Involution] = [Symplectic(b // 2) for b in blocks]
    else:
        parts = [Transpose(b) for b in blocks]
    return parts[0] if len(parts) == 1 else DirectSumOf(tuple(parts))


def cmd_jordan_compact(cfg: RunConfig) -> Outcome:
    blocks = tuple(cfg.params["ambient"])
    inv = compact_involution(blocks, cfg.params["involution"])
    cs = compact_structure(blocks, inv, cfg.seed)
    result = cs.as_dict()
    result["involution"] = None if inv is None else inv.label()
    lines = [
        f"ambient: {result['ambient']}",
        f"snake residuals: left {cs.snake_left:.3e}, right {cs.snake_right:.3e}",
        f"epsilon psd: {_flag(cs.psd)}",
    ]
    if cs.invariance is not None:
        lines.append(f"invariance under {inv.label()}: {cs.invariance:.3e}")
    return Outcome([result], cs.ok, lines)


def cmd_jordan_universal(cfg: RunConfig) -> Outcome:
    case = cfg.params["case"]
    a_text, b_text = UNIVERSAL_CASES[case]
    ut = universal_tensor_smallcase(parse_descriptor(a_text), parse_descriptor(b_text), cfg.long, cfg.seed)
    result = ut.as_dict()
    result["case"] = case
    expected = parse_descriptor(UNIVERSAL_EXPECTED[case]).canonical()
    result["expected"] = expected.name
    if ut.status == "skipped":
        return Outcome([result], True, [f"skipped: {case} ({ut.reason})"])
    ok = ut.descriptor.canonical() == expected
    lines = [f"{case}: {ut.descriptor.name} [{'ok' if ok else 'mismatch'}]"]
    return Outcome([result], ok, lines)


def cmd_bloch_simplex(cfg: RunConfig) -> Outcome:
    p = cfg.params
    n, kappa, d = p["n"], p["kappa"], p["d"]
    vectors = regular_simplex(n, kappa, d, cfg.seed)
    gap = float(np.max(np.abs(bloch_gram(vectors) - simplex_gram(n, kappa))))
    geom = BlochGeometry(d)
    rows = [
        {
            "index": i,
            "norm": v.norm(),
            "in_inball": geom.in_inball(v),
            "in_outball": geom.in_outball(v),
            "in_body": geom.in_body(v),
            "gram_residual": gap,
        }
        for i, v in enumerate(vectors)
    ]
    ok = gap <= cfg.tolerance * max(1.0, kappa**2)
    lines = [
        f"simplex n={n} kappa={kappa:.12g} d={d}: gram residual {gap:.3e}",
        f"in body: {sum(r['in_body'] for r in rows)}/{n}",
    ]
    return Outcome(rows, ok, lines)


def _ambient(text: str) -> tuple[int, ...]:
    try:
        blocks = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"ambient must look like 2 or 2,2, got {text!r}") from exc
    if not blocks or min(blocks) < 1:
        raise argparse.ArgumentTypeError(f"ambient block sizes must be positive, got {text!r}")
    return blocks


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=None, help="Tolerance (default: $QJW_TOL or 1e-9).")
    common.add_argument("-o", "--output", default=None, help="Report path; '-' renders it on stdout.")
    common.add_argument("--format", choices=FORMATS, default=None, help="Report format (default: from suffix).")
    common.add_argument("--quiet", action="store_true", help="Suppress status lines.")

    parser = argparse.ArgumentParser(prog="qjw", description="Conical designs, entanglement and Jordan composites.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name: str, handler: Callable[[RunConfig], Outcome], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    design = groups.add_parser("design", help="Build and verify conical 2-designs.")
    dsub = design.add_subparsers(dest="action", required=True)
    p = leaf(dsub, "build", cmd_design_build, "Build a design and verify it.")
    p.add_argument("--kind", choices=DESIGN_KINDS, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kappa", type=float, default=None, help="SIM contraction (default 1/(d-1)).")
    p.add_argument("--eta", type=float, default=None, help="MUM contraction (default 1/(d-1)).")
    p = leaf(dsub, "verify", cmd_design_verify, "Verify a design file.")
    p.add_argument("file", help="Design JSON or a design build report.")

    entangle = groups.add_parser("entangle", help="Concurrence and witness checks.")
    esub = entangle.add_subparsers(dest="action", required=True)
    p = leaf(esub, "table", cmd_entangle_table, "Concurrence from design probabilities on random pure states.")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--design", choices=DESIGN_KINDS, default="sic")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p = leaf(esub, "witness", cmd_entangle_witness, "Design witnesses on a Werner, isotropic or maximally mixed state.")
    p.add_argument("--state", choices=STATES, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, default=1.0, help="Werner weight or isotropic fidelity.")
    p.add_argument("--design", choices=DESIGN_KINDS, default=None, help="Default: sic for d<=3, else sim.")

    jordan = groups.add_parser("jordan", help="Jordan algebra composites.")
    jsub = jordan.add_subparsers(dest="action", required=True)
    p = leaf(jsub, "tensor", cmd_jordan_tensor, "Canonical tensor product of two algebras.")
    p.add_argument("--a", required=True, help="Descriptor such as quat:2 or real:2+complex:2.")
    p.add_argument("--b", required=True)
    p = leaf(jsub, "envelope", cmd_jordan_envelope, "Universal C*-envelope of an algebra.")
    p.add_argument("--a", required=True)
    p.add_argument("--long", action="store_true", help="Allow closure checks in ambients up to 64.")
    p = leaf(jsub, "reversible", cmd_jordan_reversible, "Reversibility of the standard embedding.")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--spin", type=int)
    which.add_argument("--a", default=None)
    p.add_argument("--maxlen", type=int, default=4)
    p.add_argument("--samples", type=int, default=WORD_SAMPLES, help="Sampled words per length above 4.")
    p = leaf(jsub, "table", cmd_jordan_table, "The canonical tensor table.")
    p.add_argument("--long", action="store_true", help="Include the quaternionic 3x3 cells.")
    p = leaf(jsub, "compact", cmd_jordan_compact, "Compact structure of a block ambient.")
    p.add_argument("--ambient", type=_ambient, required=True, help="Block sizes, e.g. 2,2.")
    p.add_argument("--involution", choices=COMPACT_INVOLUTIONS, default="auto")
    p = leaf(jsub, "universal", cmd_jordan_universal, "Universal tensor product of a small case.")
    p.add_argument("--case", choices=sorted(UNIVERSAL_CASES), required=True)
    p.add_argument("--long", action="store_true", help="Run cases with an ambient above 16.")

    bloch = groups.add_parser("bloch", help="Bloch geometry.")
    bsub = bloch.add_subparsers(dest="action", required=True)
    p = leaf(bsub, "simplex", cmd_bloch_simplex, "Regular simplex of Bloch vectors.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    return parser


def emit(cfg: RunConfig, outcome: Outcome) -> None:
    if not cfg.quiet:
        for line in outcome.lines:
            print(line)
    if cfg.output is None:
        return
    meta = report_meta(cfg.command, cfg.seed, cfg.tolerance)
    meta["params"] = dict(cfg.params)
    if str(cfg.output) == "-":
        fmt = infer_format(cfg.output, cfg.fmt)
        text = render_csv(meta, outcome.results) if fmt == "csv" else render_json(meta, outcome.results)
        sys.stdout.write(text)
        return
    write_report(cfg.output, meta, outcome.results, cfg.fmt)
    if not cfg.quiet:
        print(f"wrote: {cfg.output}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        cfg = RunConfig.from_args(args)
        outcome = args.handler(cfg)
        emit(cfg, outcome)
    except ExceptionalFactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ClosureCapExceeded, IdentificationError, ReconstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not outcome.ok:
        print(f"{cfg.command}: verification failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK
