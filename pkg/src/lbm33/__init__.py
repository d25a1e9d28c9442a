"""Compressible thermal lattice Boltzmann on the 33- and 37-velocity square lattices."""

__version__ = "0.1.0"
