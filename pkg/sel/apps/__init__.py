"""Simulators and rate curves built on the bound formulas."""
