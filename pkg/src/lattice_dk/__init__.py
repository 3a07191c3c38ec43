"""
lattice-dk - Meets of join-endomorphisms on finite lattices and
distributed knowledge for groups of agents.
"""

__version__ = "0.1.0"
