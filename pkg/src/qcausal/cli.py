"""Command-line front end: classify inputs, run demos, build artifacts.

Exit codes: 0 on success (regardless of verdict), 2 on parse or argument
errors, 3 on invariant failures such as a non-trace-preserving channel.
"""

from __future__ import annotations

import argparse
import collections
import json
import sys
from importlib import resources

import numpy as np

from .channels import KrausChannel, choi, choi_distance, measurement_channel
from .games import (
    CIRELSON_VALUE,
    and_box_channel,
    best_classical_value,
    chsh_success_quantum,
    ip_demo,
    optimal_quantum_strategy,
)
from .linalg import HADAMARD, PAULI_X, basis_vector, proj
from .localizability import mismatch_basis, twisted_partition_basis
from .measurements import OrthogonalBasis, bell_basis, completion_basis, conditional_basis, incomplete_bell_channel
from .protocols import (
    entanglement_swap_demo,
    run_semilocal_measurement,
    run_twisted_partition_protocol,
    semilocal_measurement_branches,
    twisted_partition_protocol_kraus,
)
from .report import classify_basis, classify_channel
from .serialize import ParseError, dump_document, load_document
from .twirl import PauliString, bell_twirl, stabilizer_channel, werner_twirl

_NAMED_UNITARIES = {
    "identity": np.eye(2, dtype=complex),
    "hadamard": HADAMARD,
    "x": PAULI_X,
}


def _resolve_input(path: str) -> str:
    """Use the path as given, falling back to the bundled fixtures directory."""
    import os

    if os.path.exists(path):
        return path
    bundled = resources.files("qcausal") / "fixtures" / path
    if bundled.is_file():
        return str(bundled)
    return path


def _cmd_classify(args: argparse.Namespace) -> int:
    try:
        obj = load_document(_resolve_input(args.path))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if isinstance(obj, OrthogonalBasis):
            report = classify_basis(obj, seed=args.seed, tol=args.tol)
        else:
            report = classify_channel(obj, seed=args.seed, tol=args.tol)
    except ValueError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 3
    doc = report.to_json()
    if args.json:
        print(json.dumps(doc, indent=1))
        return 0
    print(f"input: {report.input_kind} on {report.dims.dim_a} x {report.dims.dim_b}")
    print(f"trace preserving: {report.tp} (deviation {report.tp_deviation:.2e})")
    for label, entry in (("B->A blocked", report.b_to_a_blocked),
                         ("A->B blocked", report.a_to_b_blocked)):
        line = f"{label}: {entry.verdict} [{entry.criterion}]"
        if entry.witness is not None and "separation" in entry.witness:
            line += f" witness separation {entry.witness['separation']:.3f}"
        print(line)
    print(f"causal: {report.causal}")
    if report.game_value is not None:
        print(f"game value: {report.game_value:.6f} (bound {CIRELSON_VALUE:.6f})")
    print(f"localizability: {report.localizability}")
    for cert in report.obstructions:
        print(f"  certificate: {cert['kind']} (residual {cert.get('residual', 0.0):.3e})")
    return 0


def _demo_chsh(args: argparse.Namespace) -> int:
    classical, _ = best_classical_value()
    quantum = chsh_success_quantum(optimal_quantum_strategy())
    print(f"classical maximum: {classical}")
    print(f"quantum value (stated observables): {quantum:.6f}")
    print(f"quantum bound: {CIRELSON_VALUE:.6f}")
    return 0


def _demo_ip(args: argparse.Namespace) -> int:
    if len(args.x) != len(args.y):
        print("error: x and y must have equal length", file=sys.stderr)
        return 2
    print(ip_demo(args.x, args.y, seed=args.seed))
    return 0


def _demo_semilocal(args: argparse.Namespace) -> int:
    obj = load_document(_resolve_input(args.basis))
    if not isinstance(obj, OrthogonalBasis):
        print("error: semilocal demo needs a basis file", file=sys.stderr)
        return 2
    rho = proj(sum(obj.vectors) / np.sqrt(obj.size))
    counts = collections.Counter()
    for shot in range(args.shots):
        run = run_semilocal_measurement(obj, rho, seed=args.seed + shot)
        counts[run.outcome_index] += 1
    print("outcome histogram (uniform superposition input):")
    weights = {a: p for p, a, _ in semilocal_measurement_branches(obj, rho)}
    for a in sorted(counts):
        print(f"  outcome {a}: {counts[a]} / {args.shots} (weight {weights[a]:.4f})")
    print(f"trace one-way: {run.trace.one_way()}")
    return 0


def _demo_swap(args: argparse.Namespace) -> int:
    inputs = {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}
    if args.input not in inputs:
        print("error: input must be one of 00, 01, 10, 11", file=sys.stderr)
        return 2
    i, j = inputs[args.input]
    vec = np.kron(basis_vector(2, i), basis_vector(2, j))
    counts = collections.Counter()
    for shot in range(args.shots):
        result = entanglement_swap_demo(vec, seed=args.seed + shot)
        counts[result.bell_outcome] += 1
    print(f"input |{args.input}>, {args.shots} runs:")
    for label in sorted(counts):
        print(f"  {label}: {counts[label]}")
    print(f"last run correction record: {result.pauli_record}")
    return 0


def _demo_twisted(args: argparse.Namespace) -> int:
    u_b = _NAMED_UNITARIES[args.u]
    basis = twisted_partition_basis(u_b)
    target = measurement_channel(basis)
    protocol = twisted_partition_protocol_kraus(u_b)
    dist = choi_distance(choi(protocol), choi(target))
    rho = proj(sum(basis.vectors[k] for k in (0, 5, 12)) / np.sqrt(3))
    run = run_twisted_partition_protocol(u_b, rho, seed=args.seed)
    print(f"twist: {args.u}")
    print(f"protocol channel == twisted basis channel: {dist < 1e-9} "
          f"(Choi distance {dist:.2e})")
    print(f"sampled run: row {run.row}, column {run.column}")
    print("trace:")
    print(run.trace.to_json_lines())
    print(f"one-way: {run.trace.one_way()}")
    return 0


def _cmd_demo(args: argparse.Namespace) -> int:
    handlers = {
        "chsh": _demo_chsh,
        "ip": _demo_ip,
        "semilocal": _demo_semilocal,
        "swap": _demo_swap,
        "twisted": _demo_twisted,
    }
    return handlers[args.name](args)


def _build_twirl(args: argparse.Namespace) -> KrausChannel:
    if args.group == "pauli":
        return bell_twirl()
    return werner_twirl()


def _cmd_build(args: argparse.Namespace) -> int:
    try:
        if args.kind == "twirl":
            obj = _build_twirl(args)
        elif args.kind == "stabilizer":
            if not args.generators:
                raise ValueError("stabilizer build needs generator strings, e.g. +XX +ZZ")
            gens = [PauliString.parse(g) for g in args.generators]
            obj = stabilizer_channel(gens)
        elif args.kind == "twisted-basis":
            obj = twisted_partition_basis(_NAMED_UNITARIES[args.u])
        elif args.kind == "mismatch":
            obj = mismatch_basis()
        elif args.kind == "andbox":
            obj = and_box_channel()
        elif args.kind == "bell-basis":
            obj = bell_basis()
        elif args.kind == "sorkin":
            obj = incomplete_bell_channel()
        elif args.kind == "conditional-basis":
            obj = conditional_basis()
        elif args.kind == "completion-basis":
            obj = completion_basis()
        else:
            raise ValueError(f"unknown build kind {args.kind!r}")
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dump_document(obj, args.output)
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcausal",
                                     description="Classify bipartite quantum operations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="classify a channel or basis JSON file")
    p_classify.add_argument("path", help="input file (bundled fixture names also work)")
    p_classify.add_argument("--json", action="store_true", help="machine-readable output")
    p_classify.add_argument("--seed", type=int, default=0)
    p_classify.add_argument("--tol", type=float, default=1e-9,
                            help="matrix comparison tolerance")
    p_classify.set_defaults(func=_cmd_classify)

    p_demo = sub.add_parser("demo", help="run a bundled demonstration")
    p_demo.add_argument("name", choices=["chsh", "ip", "semilocal", "swap", "twisted"])
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--x", default="101", help="ip demo: first bitstring")
    p_demo.add_argument("--y", default="110", help="ip demo: second bitstring")
    p_demo.add_argument("--basis", default="bell_basis.json",
                        help="semilocal demo: basis file")
    p_demo.add_argument("--shots", type=int, default=200)
    p_demo.add_argument("--input", default="00", help="swap demo: product input")
    p_demo.add_argument("--u", default="hadamard", choices=sorted(_NAMED_UNITARIES),
                        help="twisted demo: twist unitary")
    p_demo.set_defaults(func=_cmd_demo)

    p_build = sub.add_parser("build", help="write a constructed channel/basis as JSON")
    p_build.add_argument("kind", choices=["twirl", "stabilizer", "twisted-basis", "mismatch",
                                          "andbox", "bell-basis", "sorkin",
                                          "conditional-basis", "completion-basis"])
    p_build.add_argument("generators", nargs="*",
                         help="stabilizer build: Pauli strings like +XX +ZZ")
    p_build.add_argument("--group", default="pauli", choices=["pauli", "tetrahedral"],
                         help="twirl build: which group")
    p_build.add_argument("--u", default="hadamard", choices=sorted(_NAMED_UNITARIES),
                         help="twisted-basis build: twist unitary")
    p_build.add_argument("-o", "--output", required=True)
    p_build.set_defaults(func=_cmd_build)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
