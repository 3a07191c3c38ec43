"""
Tests for lattice-dk.
"""
