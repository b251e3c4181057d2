"""Command-line front end.

    vqecompile ANSATZ.json [--seed N] [--no-gamma] [--no-hybrid] [--ga-budget G]
               [--sa-sweeps S] [--restarts R] [--certify {off,sampled,full}]
               [--out-circuit PATH] [--out-report PATH]

The ansatz file is JSON::

    {"n_orbitals": 8, "indexing": "zero_based",
     "terms": [{"create": [3, 2], "annihilate": [1, 0], "param": "t0"}, ...]}

``indexing`` may be "one_based" so that hand-written examples paste directly;
indices are shifted down by one on input.  ``param`` defaults to "t<k>".

Exit codes: 0 success, 2 malformed input (with line and column), 3 index out
of range, 4 unreadable input or unwritable output, 5 a certified block failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .fermion import ExcitationTerm, TermError
from .pipeline import CERTIFY_MODES, CompileConfig, compile

EXIT_OK, EXIT_PARSE, EXIT_RANGE, EXIT_IO, EXIT_CERT = 0, 2, 3, 4, 5


class AnsatzError(ValueError):
    def __init__(self, msg: str, line: int, col: int, code: int = EXIT_PARSE):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col, self.code = line, col, code


@dataclass(frozen=True)
class Ansatz:
    n_orbitals: int
    terms: tuple[ExcitationTerm, ...]


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _skip(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def _scan_object(text: str, i: int, dec: json.JSONDecoder) -> tuple[dict, dict, int]:
    """Decode an object at ``i``; also return the start offset of each value."""
    if text[i:i + 1] != "{":
        raise AnsatzError("expected an object", *_linecol(text, i))
    out, where = {}, {}
    i = _skip(text, i + 1)
    if text[i:i + 1] == "}":
        return out, where, i + 1
    while True:
        key, i = dec.raw_decode(text, i)
        i = _skip(text, i)
        if text[i:i + 1] != ":":
            raise AnsatzError("expected ':'", *_linecol(text, i))
        i = _skip(text, i + 1)
        where[key] = i
        out[key], i = dec.raw_decode(text, i)
        i = _skip(text, i)
        if text[i:i + 1] == "}":
            return out, where, i + 1
        if text[i:i + 1] != ",":
            raise AnsatzError("expected ',' or '}'", *_linecol(text, i))
        i = _skip(text, i + 1)


def _array_starts(text: str, i: int, dec: json.JSONDecoder) -> list[int]:
    starts = []
    i = _skip(text, i + 1)
    if text[i:i + 1] == "]":
        return starts
    while True:
        starts.append(i)
        _, i = dec.raw_decode(text, i)
        i = _skip(text, i)
        if text[i:i + 1] == "]":
            return starts
        i = _skip(text, i + 1)


def parse_ansatz(text: str) -> Ansatz:
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise AnsatzError(e.msg, e.lineno, e.colno) from None
    dec = json.JSONDecoder()
    top, where, _ = _scan_object(text, _skip(text, 0), dec)
    loc = lambda key: _linecol(text, where.get(key, 0))  # noqa: E731

    n = top.get("n_orbitals")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise AnsatzError("n_orbitals must be a non-negative integer", *loc("n_orbitals"))
    indexing = top.get("indexing", "zero_based")
    if indexing not in ("zero_based", "one_based"):
        raise AnsatzError('indexing must be "zero_based" or "one_based"', *loc("indexing"))
    offset = 1 if indexing == "one_based" else 0
    raw = top.get("terms", [])
    if not isinstance(raw, list):
        raise AnsatzError("terms must be a list", *loc("terms"))
    starts = _array_starts(text, where["terms"], dec) if raw else []

    terms = []
    for k, (item, pos) in enumerate(zip(raw, starts)):
        at = _linecol(text, pos)
        if not isinstance(item, dict):
            raise AnsatzError(f"term {k} must be an object", *at)
        fields = {}
        for key in ("create", "annihilate"):
            v = item.get(key)
            if not isinstance(v, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
                raise AnsatzError(f"term {k}: {key} must be a list of integers", *at)
            fields[key] = tuple(i - offset for i in v)
        param = item.get("param", f"t{k}")
        if not isinstance(param, str) or not param.isidentifier():
            raise AnsatzError(f"term {k}: param must be an identifier", *at)
        idx = fields["create"] + fields["annihilate"]
        if any(i < 0 or i >= n for i in idx):
            bad = next(i + offset for i in idx if i < 0 or i >= n)
            raise AnsatzError(f"term {k}: index {bad} outside {indexing} range for {n} orbitals", *at, code=EXIT_RANGE)
        try:
            terms.append(ExcitationTerm(fields["create"], fields["annihilate"], param))
        except TermError as e:
            raise AnsatzError(f"term {k}: {e}", *at) from None
    return Ansatz(n, tuple(terms))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vqecompile", description="Compile excitation terms to a CNOT-lean circuit.")
    ap.add_argument("ansatz", help="JSON ansatz file, or - for stdin")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-gamma", action="store_true", help="skip the GL(N,2) re-encoding search")
    ap.add_argument("--no-hybrid", action="store_true", help="compile every term uncompressed")
    ap.add_argument("--ga-budget", type=int, default=200, help="GA generations per schedule")
    ap.add_argument("--sa-sweeps", type=int, default=50, help="annealing sweeps per block")
    ap.add_argument("--restarts", type=int, default=64, help="random coloring orders")
    ap.add_argument("--certify", choices=CERTIFY_MODES, default="full")
    ap.add_argument("--out-circuit", default="-", help="QASM output path (default stdout)")
    ap.add_argument("--out-report", help="JSON report path")
    return ap


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.ansatz == "-" else open(args.ansatz, encoding="utf-8").read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        ansatz = parse_ansatz(text)
        cfg = CompileConfig(
            seed=args.seed, ga_budget=args.ga_budget, sa_sweeps=args.sa_sweeps, restarts=args.restarts,
            enable_gamma=not args.no_gamma, enable_hybrid=not args.no_hybrid, certify=args.certify,
        )
    except AnsatzError as e:
        print(f"{args.ansatz}: {e}", file=sys.stderr)
        return e.code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    circuit, report = compile(list(ansatz.terms), ansatz.n_orbitals, cfg)
    try:
        _write(args.out_circuit, circuit.to_qasm())
        if args.out_report:
            _write(args.out_report, report.to_json())
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    row = report.to_dict()["table_row"]
    print(f"cnots {row['Adv']} (JW {row['JW']}, {row['Improve(%)']}% fewer)", file=sys.stderr)
    if report.certification["all_passed"] is False:
        print("error: a block failed certification", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
