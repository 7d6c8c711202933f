"""Toolkit for building and scoring e-commerce instruction-tuning corpora."""

__version__ = "0.1.0"
