"""qir: an interactive retrieval engine whose user model is a density
operator over an information-need space."""

__version__ = "0.1.0"
