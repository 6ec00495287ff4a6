"""Desk-scale combinatorics of trees, colored operads and dendroidal sets."""

__version__ = "0.1.0"
