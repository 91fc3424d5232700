"""Translation lengths on Siegel space, Jensen square sums and lifted actions on surface covers."""

__version__ = "0.1.0"
