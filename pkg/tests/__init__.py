"""
Tests for fuzzy-analogy effort estimation
"""
