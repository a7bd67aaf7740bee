"""
liquidweight: influence measures for liquid-democracy delegation graphs
"""
__version__ = "1.0.0"
