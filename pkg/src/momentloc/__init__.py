"""momentloc: exact localization measures, 2d Yang-Mills sums, and
moment-map gradient-flow experiments."""

__version__ = "0.1.0"
