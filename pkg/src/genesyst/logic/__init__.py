"""Predicate language, substitutions and simplification."""
