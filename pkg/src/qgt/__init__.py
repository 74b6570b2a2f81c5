"""q-deformed characters of classical groups, their contour-integral limits, and q-Gelfand-Tsetlin graphs."""

__version__ = "0.1.0"
