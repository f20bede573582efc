"""Linear series on binary curves, counted exactly over finite fields."""

__version__ = "0.1.0"
