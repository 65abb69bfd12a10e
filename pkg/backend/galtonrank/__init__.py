"""
Galton rank order statistic, the dominance index and their limit laws.
"""

__version__ = "1.0.0"
