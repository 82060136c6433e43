"""
pwrot: piecewise rotations of the plane.

Two-piece rotations, their injectivity discriminant, certified bounds on the
size of their limit sets (irrational and rational even-denominator angles),
periodic islands and limit-set rasters.
"""
__version__ = "1.0.0"
