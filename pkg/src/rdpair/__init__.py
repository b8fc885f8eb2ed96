"""Hybrid (2,1)-norms, Schreier graphs and rapid-decay experiments for group/subgroup pairs."""

__version__ = "0.1.0"
