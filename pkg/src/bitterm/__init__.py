"""bitterm: bit-precise interprocedural termination analysis
"""

__version__ = "0.1"
