"""spinlab: finite-dimensional spin and Clifford constructions with checkable identities."""

__version__ = "0.1.0"
