"""
EcoAttn - multiplication-free L1 attention, its reference kernels and accounting
"""

__version__ = "0.1.0"
