"""Monadic logic workbench."""
