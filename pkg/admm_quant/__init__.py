"""
ADMM Quant
==========

ADMM-Q family solvers for smooth objectives over discrete product sets,
with verification instruments and a benchmark harness.
"""

__version__ = "1.0.0"
__author__ = "ADMM Quant Team"
