"""Paradoxical decompositions in finitely generated groups: constructions,
window-exact matching engines, and independently verifiable certificates."""

__version__ = "0.1.0"
