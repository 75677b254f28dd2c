"""Cons-free higher-order rewriting: analysis, evaluation and a cons-free interpreter."""

__version__ = "0.1.0"
