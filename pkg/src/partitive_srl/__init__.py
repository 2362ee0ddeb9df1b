"""Toolkit for finding ARG1 arguments of partitive noun predicates."""

__version__ = "0.1.0"
