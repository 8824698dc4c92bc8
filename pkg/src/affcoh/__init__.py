"""Exact-arithmetic verifier for graded self-extension algebras of vacuum and
Verma modules over loop algebras, with oper-side partition oracles."""

__version__ = "0.1.0"
