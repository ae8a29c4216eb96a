"""Piezoelectric energy harvester co-design toolkit.

Models cantilever bimorph harvesters as Kirchhoff-Love plates, simulates
their voltage response to bridge acceleration, and jointly evaluates
harvested energy and vehicle-speed sensing accuracy over a family of
device lengths.
"""

__version__ = "0.1.0"
