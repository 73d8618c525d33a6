"""Tests for the q-Mittag-Leffler numerics project."""
