"""Exact computations with twisted Zhu algebras and their bimodules for the free boson."""

__version__ = "0.1.0"
