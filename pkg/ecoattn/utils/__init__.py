"""
Utility modules for EcoAttn
"""
