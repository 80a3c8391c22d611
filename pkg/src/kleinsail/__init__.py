"""Klein sails of two-dimensional continued fractions of cubic irrationalities."""

__version__ = "0.1.0"
