"""Monadic CSP engine: one-step processes with return values, trace and
stable-failures semantics, refinement checking, a small process DSL, and an
interactive stepper."""

__version__ = "0.1.0"
