"""Randomized low-treewidth pattern covering for graphs of polynomial growth."""

__version__ = "0.1.0"
