"""Relative hyperbolicity toolkit: coned-off graphs, homological bicombings,
separating cosets and the arrays built from them."""

__version__ = "0.1.0"
