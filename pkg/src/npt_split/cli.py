"""Command-line front end.

    npt-split analyze --family fock --param m=1
    npt-split analyze --pnd-file state.json --format csv-summary
    npt-split sweep --family binomial --param M=2 --sweep eta=0.1:0.9:0.1

PND file schema::

    {"probs": [p0, p1, ...], "tail_bound": 0.0}     # tail_bound optional, default 0

Report schema (JSON, ``schema_version`` 1), top-level keys in order:
``schema_version``, ``input_spec``, ``pnd_summary``, ``classicality``,
``npt``, ``theorem_consistency``, ``timings``.  Everything except
``timings`` is a deterministic function of the input.

Exit status: 0 on success whatever the physics verdict, 2 for usage errors,
3 for invalid input, 4 if a report breaks one of the two implications it checks (a bug).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import BadFlag, EmptyGrid, InputError, ParseError
from .fock_core import PhotonNumberDistribution, validate_pnd
from .moments import DEFAULT_TOL, Verdict, classicality_check, mandel_statistics
from .npt import NPTVerdict, npt_certificate, witness_2x2, witness_threshold
from .states import DEFAULT_TAIL_TARGET, FamilySpec, build_pnd

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_CHAIN = 4

CSV_COLUMNS = [
    "mean",
    "antibunching_value",
    "classical",
    "detecting_kind",
    "detecting_order",
    "npt_verdict",
    "npt_method",
    "min_pt_eigenvalue",
    "log_negativity",
]


class ChainViolation(RuntimeError):
    """A report breaks antibunching => NPT or nonclassical => NPT."""


def load_pnd_file(path: str | os.PathLike) -> PhotonNumberDistribution:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "probs" not in doc:
        raise ParseError(f'{path}: expected an object with a "probs" array')
    unknown = sorted(set(doc) - {"probs", "tail_bound"})
    if unknown:
        raise ParseError(f"{path}: unknown fields {unknown}")
    probs = doc["probs"]
    tail = doc.get("tail_bound", 0)
    if not isinstance(probs, list) or not all(_is_number(x) for x in probs):
        raise ParseError(f'{path}: "probs" must be an array of numbers')
    if not _is_number(tail):
        raise ParseError(f'{path}: "tail_bound" must be a number')
    return validate_pnd(probs, tail)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def analyze_pnd(
    pnd: PhotonNumberDistribution,
    input_spec: dict,
    orders: int | None = None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Full pipeline for one distribution, returned as a report dictionary."""
    t0 = time.perf_counter()
    stats = mandel_statistics(pnd)
    t1 = time.perf_counter()
    classicality = classicality_check(pnd, orders, tol)
    t2 = time.perf_counter()
    npt = npt_certificate(pnd, orders, tol)
    t3 = time.perf_counter()

    is_npt = npt.verdict is NPTVerdict.NPT
    # same scaling as the witness; reduces to -tol while <n> <= 2
    witness, _ = witness_2x2(pnd, tol)
    antibunching_floor = -float(witness_threshold(witness.entries, tol))
    return {
        "schema_version": SCHEMA_VERSION,
        "input_spec": input_spec,
        "pnd_summary": {
            "n_max": pnd.n_max,
            "tail_bound": pnd.tail_bound,
            "mean": stats.mean,
            "antibunching_value": stats.antibunching_value,
            "mandel_q": stats.mandel_q,
        },
        "classicality": classicality.as_dict(),
        "npt": npt.as_dict(),
        "theorem_consistency": {
            "thm1_chain_ok": bool(stats.antibunching_value >= antibunching_floor or is_npt),
            "thm2_chain_ok": bool(classicality.verdict is Verdict.CLASSICAL or is_npt),
        },
        "timings": {
            "statistics_ms": 1e3 * (t1 - t0),
            "classicality_ms": 1e3 * (t2 - t1),
            "npt_ms": 1e3 * (t3 - t2),
        },
    }


def check_chains(report: dict) -> None:
    bad = [k for k, ok in report["theorem_consistency"].items() if not ok]
    if bad:
        raise ChainViolation(f"implication check failed: {', '.join(bad)}")


def summary_row(report: dict) -> dict:
    cls, npt, pnd = report["classicality"], report["npt"], report["pnd_summary"]
    return {
        "mean": pnd["mean"],
        "antibunching_value": pnd["antibunching_value"],
        "classical": cls["verdict"] == Verdict.CLASSICAL.value,
        "detecting_kind": cls["detecting_kind"],
        "detecting_order": "" if cls["detecting_order"] is None else cls["detecting_order"],
        "npt_verdict": npt["verdict"],
        "npt_method": npt["method"] or "none",
        "min_pt_eigenvalue": npt["min_pt_eigenvalue"],
        "log_negativity": npt["log_negativity"],
    }


def render_json(report: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def render_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def parse_params(items: list[str] | None) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise BadFlag(f"--param expects key=value, got {item!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise BadFlag(f"--param {key}: {value!r} is not a number") from None
    return params


def parse_grid(text: str) -> tuple[str, list[float]]:
    """``key=start:stop:step`` with stop included (up to 1e-9 relative slack)."""
    key, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or not key or len(parts) != 3:
        raise BadFlag(f"--sweep expects key=start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError:
        raise BadFlag(f"--sweep {key}: non-numeric range {rng!r}") from None
    if not step > 0 or stop < start or not all(map(math.isfinite, (start, stop, step))):
        raise EmptyGrid(f"--sweep {key}={rng} describes no grid points")
    count = int(math.floor((stop - start) / step * (1 + 1e-9) + 1e-9)) + 1
    return key, [round(start + i * step, 12) for i in range(count)]


def family_spec(args) -> FamilySpec:
    if args.pnd_file and args.family:
        raise BadFlag("give either --family or --pnd-file, not both")
    if args.pnd_file:
        return FamilySpec("file", path=str(args.pnd_file))
    if not args.family:
        raise BadFlag("one of --family or --pnd-file is required")
    return FamilySpec(args.family.replace("-", "_"), parse_params(args.param), args.tail_target)


def resolve(spec: FamilySpec) -> PhotonNumberDistribution:
    if spec.name == "file":
        return load_pnd_file(spec.path)
    return build_pnd(spec)


def _sweep_point(job: tuple[FamilySpec, str, float, int | None, float]) -> dict:
    spec, key, value, orders, tol = job
    try:
        report = analyze_pnd(resolve(spec), spec.as_dict(), orders, tol)
    except InputError as exc:
        raise type(exc)(f"at {key}={value!r}: {exc}") from None
    return report


def cmd_analyze(args) -> int:
    spec = family_spec(args)
    report = analyze_pnd(resolve(spec), spec.as_dict(), args.orders, args.tol)
    if args.format == "json":
        text = render_json(report)
    else:
        text = render_csv([summary_row(report)], CSV_COLUMNS)
    _emit(text, args.out)
    check_chains(report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = family_spec(args)
    if spec.name == "file":
        raise BadFlag("--sweep needs a --family, not a file")
    key, grid = parse_grid(args.sweep)
    jobs = [
        (FamilySpec(spec.name, {**spec.params, key: v}, spec.tail_target), key, v, args.orders, args.tol)
        for v in grid
    ]
    workers = args.jobs or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        reports = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            reports = list(pool.map(_sweep_point, jobs))
    rows = [{key: v, **summary_row(r)} for v, r in zip(grid, reports)]
    _emit(render_csv(rows, [key] + CSV_COLUMNS), args.out)
    for r in reports:
        check_chains(r)
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npt-split",
        description="Certify NPT entanglement of a phase-invariant state split against vacuum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", help="fock | poisson | thermal | binomial | vacuum-two-mixture | mixture")
    common.add_argument("--param", action="append", metavar="K=V", help="family parameter (repeatable)")
    common.add_argument("--pnd-file", help="JSON file with probs and optional tail_bound")
    common.add_argument("--tail-target", type=float, default=DEFAULT_TAIL_TARGET,
                        help="truncation tail for poisson/thermal families")
    common.add_argument("--orders", type=int, default=None, help="highest Hankel/submatrix order N")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--out", help="write here instead of stdout")

    analyze = sub.add_parser("analyze", parents=[common], help="analyse one distribution")
    analyze.add_argument("--format", choices=["json", "csv-summary"], default="json")
    analyze.set_defaults(func=cmd_analyze)

    sweep = sub.add_parser("sweep", parents=[common], help="scan one family parameter, CSV out")
    sweep.add_argument("--sweep", required=True, metavar="K=A:B:STEP")
    sweep.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.orders is not None and args.orders < 1:
        parser.error("--orders must be >= 1")
    if not args.tol > 0:
        parser.error("--tol must be > 0")
    try:
        return args.func(args)
    except BadFlag as exc:
        print(f"npt-split: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"npt-split: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChainViolation as exc:
        print(f"npt-split: {exc}", file=sys.stderr)
        return EXIT_CHAIN


if __name__ == "__main__":
    sys.exit(main())
