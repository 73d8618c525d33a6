"""
q-Mittag-Leffler Numerics
q-calculus primitives, extended q-Mittag-Leffler functions, their transforms
and a randomized identity verifier.
"""

__version__ = "1.0.0"
