"""lpm: a proof-checking kernel for the lambda-Pi-calculus modulo rewriting,
with an embedding pipeline for polymorphic first-order theories and
sequent-style refutation certificates."""

from . import dkparse, embed, examples, kernel, llproof, sexp, signature, terms, tff

__all__ = [
    "dkparse",
    "embed",
    "examples",
    "kernel",
    "llproof",
    "sexp",
    "signature",
    "terms",
    "tff",
]

__version__ = "0.1.0"
