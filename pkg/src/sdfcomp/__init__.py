"""Shape complementarity scoring with skeletal density affinity fields."""

__version__ = "0.1.0"
