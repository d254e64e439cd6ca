"""Pomset semantics for MSC test purposes, well-formedness checks, and
validation of test cases against them."""

from .errors import TpError
from .msc import parse, pretty, desugar
from .semantics import Limits, build_semantics, language
from .testcase import TestCase, parse_testcase, serialize_testcase
from .validator import synthesize, valid
from .wellformed import check

__all__ = [
    "TpError",
    "parse",
    "pretty",
    "desugar",
    "Limits",
    "build_semantics",
    "language",
    "TestCase",
    "parse_testcase",
    "serialize_testcase",
    "synthesize",
    "valid",
    "check",
]
