"""Versioned JSON schemas for the command-line documents."""
