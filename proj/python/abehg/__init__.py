"""Ciphertext-policy ABE over BLS12-381 with hybrid record envelopes."""

from ._abehg import (
    Error,
    PolicyNotSatisfiedError,
    ParseError,
    fit_linear,
    keygen,
    normalize_attribute,
    open_envelope,
    parse_infix,
    parse_policy,
    satisfies,
    seal,
    setup,
)

__all__ = [
    "Error",
    "PolicyNotSatisfiedError",
    "ParseError",
    "fit_linear",
    "keygen",
    "normalize_attribute",
    "open_envelope",
    "parse_infix",
    "parse_policy",
    "satisfies",
    "seal",
    "setup",
]
