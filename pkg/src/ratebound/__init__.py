"""Rate-region toolkit for two-user broadcast, interference and cognitive channels."""

__version__ = "0.1.0"
