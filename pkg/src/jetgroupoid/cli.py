"""Command-line front end.

Exit codes: 0 success, 1 a verified property failed, 2 usage or schema error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .connection import ChristoffelGerm
from .germ import GermError, MatrixGerm, random_group_germ, trivialize_covariant, trivialize_flat
from .jets import JetError, TrivializedJet, check_image_k2, image_residual_k2, inverse, multiply
from .lie import GroupError, MatrixGroup
from .partitions import Partition, compositions, count_c, count_N, enumerate_antilex, enumerate_p1plus
from .tensor import TensorError
from .verify import MAX_K, MAX_N, default_tol, run_verification, verify_jet, verify_pair

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_SCHEMA_ERRORS = (GermError, GroupError, JetError, TensorError, KeyError, TypeError, ValueError)


class UsageError(Exception):
    pass


def _dump(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def _emit(data: Any, output: str | None) -> None:
    text = _dump(data) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _load_jet(path: str) -> TrivializedJet:
    jet = TrivializedJet.from_json(_load(path))
    jet.validate()
    return jet


def cmd_partitions(args: argparse.Namespace) -> int:
    if args.j < 1:
        raise UsageError("j must be at least 1")
    if args.kind == "p1plus":
        family, counter = enumerate_p1plus(args.j), count_c
    else:
        family, counter = enumerate_antilex(args.j), count_N
    per_size = [
        {"sizes": list(sizes), "count": counter(sizes), "enumerated": sum(p.sizes == sizes for p in family)}
        for sizes in compositions(args.j)
    ]
    if args.format == "json":
        data: dict[str, Any] = {
            "kind": args.kind,
            "j": args.j,
            "size": len(family),
            "partitions": [p.to_json() for p in family],
            "counts": per_size,
        }
        if args.kind == "p1plus":
            from .partitions import sign

            data["signs"] = [sign(p) for p in family]
        _emit(data, args.output)
        return EXIT_OK
    lines = [f"# {args.kind} j={args.j} size={len(family)}"]
    lines += [str(p) for p in family]
    label = "c" if args.kind == "p1plus" else "N"
    lines.append(f"# sizes\t{label}\tenumerated")
    lines += [f"{tuple(row['sizes'])}\t{row['count']}\t{row['enumerated']}" for row in per_size]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    if args.jet:
        report = verify_jet(_load_jet(args.jet), tol)
    elif args.pair:
        report = verify_pair(_load_jet(args.pair[0]), _load_jet(args.pair[1]), tol)
    else:
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not 1 <= args.n <= MAX_N or not 1 <= args.k <= MAX_K:
            raise UsageError(f"supported sizes are n <= {MAX_N}, k <= {MAX_K}")
        group = MatrixGroup.from_tag(args.group)
        report = run_verification(group, args.n, args.k, args.trials, args.seed, tol, covariant=not args.flat_only)
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_sample_germ(args: argparse.Namespace) -> int:
    group = MatrixGroup.from_tag(args.group)
    germ = random_group_germ(np.random.default_rng(args.seed), group, args.n, args.K)
    _emit(germ.to_json(), args.output)
    return EXIT_OK


def cmd_jet(args: argparse.Namespace) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    if args.action == "trivialize":
        germ = MatrixGerm.from_json(_load(args.inputs[0]))
        group = MatrixGroup.from_tag(args.group or germ.group_tag or f"gl{germ.N}")
        k = args.k if args.k is not None else germ.K
        if args.christoffel:
            jet = trivialize_covariant(germ, k, ChristoffelGerm.from_json(_load(args.christoffel)), group)
        else:
            jet = trivialize_flat(germ, k, group)
        _emit(jet.to_json(), args.output)
        return EXIT_OK
    if args.action == "multiply":
        if len(args.inputs) != 2:
            raise UsageError("multiply needs two jet files")
        _emit(multiply(_load_jet(args.inputs[0]), _load_jet(args.inputs[1])).to_json(), args.output)
        return EXIT_OK
    if args.action == "inverse":
        _emit(inverse(_load_jet(args.inputs[0])).to_json(), args.output)
        return EXIT_OK
    jet = _load_jet(args.inputs[0])
    image_tol = args.tol if args.tol is not None else 1e-9
    ok = check_image_k2(jet, image_tol)
    _emit({"in_image": ok, "residual": image_residual_k2(jet), "tol": image_tol}, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetgroupoid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", help="enumerate P1+(j) or Pa(j) with their counts")
    p.add_argument("kind", choices=["p1plus", "antilex"])
    p.add_argument("j", type=int)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_partitions)

    v = sub.add_parser("verify", help="randomized oracle checks, or checks on stored jets")
    v.add_argument("--group", default="so3")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--k", type=int, default=3)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float)
    v.add_argument("--format", choices=["json"], default="json")
    v.add_argument("--flat-only", action="store_true", help="skip the covariant-connection properties")
    v.add_argument("--jet", help="verify a single jet file instead of random trials")
    v.add_argument("--pair", nargs=2, metavar=("JET", "INVERSE"), help="check that INVERSE inverts JET")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    j = sub.add_parser("jet", help="jet arithmetic on JSON files")
    j.add_argument("action", choices=["trivialize", "multiply", "inverse", "check-image"])
    j.add_argument("inputs", nargs="+")
    j.add_argument("--k", type=int)
    j.add_argument("--group")
    j.add_argument("--christoffel", help="connection JSON for covariant trivialization")
    j.add_argument("--tol", type=float)
    j.add_argument("--format", choices=["json"], default="json")
    j.add_argument("-o", "--output")
    j.set_defaults(func=cmd_jet)

    s = sub.add_parser("sample-germ", help="write a seeded random group-valued germ")
    s.add_argument("--group", default="so3")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample_germ)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"jetgroupoid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _SCHEMA_ERRORS as exc:
        print(f"jetgroupoid: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
