"""Scenario tests mapped to docs/TEST_RULES.md."""
