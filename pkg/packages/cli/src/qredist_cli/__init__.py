"""qredist CLI - Terminal interface for entropy-difference experiments."""

__version__ = "0.1.0"
