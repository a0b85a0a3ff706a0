"""Forum sentiment index construction and MIC dependence analysis."""

__version__ = "0.1.0"
