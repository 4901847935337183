"""
Numerical services for free Dirac evolution and carrier-border analysis.
"""
