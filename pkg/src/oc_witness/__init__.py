"""oc-witness: preparation-contextuality witnesses from communication tasks and Bell scenarios."""

__version__ = "0.1.0"
