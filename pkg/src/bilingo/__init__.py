"""bilingo: build gamified language courses from a treebank and a lexical database."""

__version__ = "0.1.0"
