"""Closed-form finite-blocklength bounds and inequality evaluators."""
