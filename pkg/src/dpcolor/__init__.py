"""DP-coloring of plane graphs: covers, precoloring extension search, and
exact discharging ledgers."""

__version__ = "0.1.0"
