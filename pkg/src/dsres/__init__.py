"""Exact arithmetic engine for Drinfeld-Sokolov resolvents of type A_n."""

__version__ = "0.1.0"
