"""
Partitioned combinatorial optimization games: coalition values, core
verification, core existence with exact certificates, and instance
generators.
"""

__version__ = "0.1.0"
