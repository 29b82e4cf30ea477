"""Matrix completion for entries missing not at random."""

__version__ = "0.1.0"
