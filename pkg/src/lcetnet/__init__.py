"""Batch analytics for patent-science citation networks of low-carbon energy technologies."""

__version__ = "0.1.0"
