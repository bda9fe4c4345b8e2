"""Hyperbolized twisted cohomological equations for cocycles by isometries of R^l."""

__version__ = "0.1.0"
