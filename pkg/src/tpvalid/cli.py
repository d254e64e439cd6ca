"""Command-line front end.

Exit codes: 0 success or valid, 1 malformed purpose or invalid test case,
2 usage or parse error, 3 resource cap hit.  Results go to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .errors import ParseError, ResourceLimitError, TpError
from .msc import desugar, format_trace, parse, pretty
from .semantics import DEFAULT_MAX_LIN, Limits, build_semantics, language
from .testcase import parse_testcase, serialize_testcase
from .validator import synthesize, valid
from .wellformed import check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


@dataclass(frozen=True)
class CliConfig:
    command: str
    purpose_path: str
    testcase_path: Optional[str] = None
    output: Optional[str] = None
    format: str = "text"
    max_lin: int = DEFAULT_MAX_LIN
    max_len: int = 64

    @property
    def limits(self) -> Limits:
        return Limits(self.max_lin, self.max_len)


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--max-lin", type=_positive, default=DEFAULT_MAX_LIN, help="cap on enumerated traces")
    common.add_argument("--max-len", type=_positive, default=64, help="cap on observable trace length")

    parser = argparse.ArgumentParser(prog="tpvalid", description="Check MSC test purposes and validate test cases.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("lint", "parse and print the normalized document"),
        ("check", "report well-formedness"),
        ("traces", "list complete observable traces with verdicts"),
        ("synth", "write a valid test case"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("purpose", help="purpose file, or - for stdin")
        if name == "synth":
            p.add_argument("-o", "--output", help="write the test case here instead of stdout")
    p = sub.add_parser("validate", parents=[common], help="run the validation algorithm")
    p.add_argument("purpose")
    p.add_argument("testcase", help="test-case file, or - for stdin")
    return parser


def parse_config(argv: Sequence[str]) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(
        command=ns.command,
        purpose_path=ns.purpose,
        testcase_path=getattr(ns, "testcase", None),
        output=getattr(ns, "output", None),
        format=ns.format,
        max_lin=ns.max_lin,
        max_len=ns.max_len,
    )


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _execute(cfg: CliConfig, stdin: TextIO, out: TextIO, err: TextIO) -> int:
    if cfg.purpose_path == "-" and cfg.testcase_path == "-":
        err.write("tpvalid: purpose and test case cannot both come from stdin\n")
        return EXIT_USAGE
    doc = parse(_read(cfg.purpose_path, stdin))
    if cfg.command == "lint":
        out.write(pretty(desugar(doc)))
        return EXIT_OK

    s = build_semantics(doc, cfg.limits)
    report = check(s)
    if cfg.command == "check":
        out.write(report.records() if cfg.format == "records" else report.text())
        return EXIT_OK if report.well_formed else EXIT_FAIL

    if cfg.command == "traces":
        for trace, verdict in language(s).complete():
            out.write(f"{verdict}\t{format_trace(trace)}\n")
        return EXIT_OK

    if not report.well_formed:
        err.write(report.text())
        return EXIT_FAIL

    if cfg.command == "synth":
        text = serialize_testcase(synthesize(s))
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            out.write(text)
        return EXIT_OK

    ts = parse_testcase(_read(cfg.testcase_path, stdin))
    result = valid(s, ts)
    out.write(result.records() if cfg.format == "records" else result.text())
    return EXIT_OK if result.ok else EXIT_FAIL


def run(
    argv: Sequence[str],
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            cfg = parse_config(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _execute(cfg, stdin, out, err)
    except OSError as exc:
        err.write(f"tpvalid: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"tpvalid: parse error: {exc}\n")
        return EXIT_USAGE
    except ResourceLimitError as exc:
        err.write(f"tpvalid: resource limit: {exc}\n")
        return EXIT_LIMIT
    except TpError as exc:
        err.write(f"tpvalid: {exc}\n")
        return EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
