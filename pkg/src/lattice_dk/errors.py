"""
Exception hierarchy for lattice-dk.

Library code raises these; the CLI maps them to exit codes.
"""


class LatticeError(Exception):
    """Base class for every error raised by lattice-dk."""

    exit_code = 3


class ParseError(LatticeError):
    """Input file could not be read or decoded."""

    exit_code = 2


class NotALattice(LatticeError):
    """Some pair lacks a unique least upper bound or greatest lower bound."""


class NotBounded(LatticeError):
    """The order has no global bottom or no global top."""


class CycleDetected(LatticeError):
    """The generating relation contains a cycle."""


class NotDistributive(LatticeError):
    """An algorithm that requires a distributive lattice got another one."""

    exit_code = 4


class NotJoinIrreducible(LatticeError):
    """An element expected in J(L) is not join-irreducible."""


class MissingTwoCovers(LatticeError):
    """A non join-irreducible element above bottom has fewer than two lower covers."""


class InstanceTooLarge(LatticeError):
    """The brute-force search space exceeds the enumeration budget."""


class TooManyStates(LatticeError):
    """Too many states to tabulate a knowledge operator."""


class SizeMismatch(LatticeError):
    """Operands were built over different sizes."""


class NotAPartition(LatticeError):
    """Blocks overlap, are empty, or do not cover every element."""


class TooLarge(LatticeError):
    """The requested lattice exceeds the size the backend supports."""


class OutputTooLarge(LatticeError):
    """A generator produced more elements than the configured cap."""
