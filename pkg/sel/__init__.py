"""sel: smooth entropy lab, one-shot entropies and finite-blocklength bounds."""

__version__ = "0.1.0"
