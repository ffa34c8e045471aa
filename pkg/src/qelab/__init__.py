"""qelab - boundary quantum ergodicity laboratory."""

__version__ = "0.1.0"
