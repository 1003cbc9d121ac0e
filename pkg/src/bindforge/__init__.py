"""Binding toolchain for C++ libraries: parse headers into a declaration IR,
classify declarations by binding pattern, scaffold a mirrored binding tree,
emit nanobind source for the mechanical cases, lint binding files against
known failure modes, and package review prompts for the rest."""

from __future__ import annotations

__version__ = "0.1.0"
