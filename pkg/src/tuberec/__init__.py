"""tuberec: metric reconstruction of model Hadamard spaces from the
unit-distance relation alone.

The package treats four model geometries (Euclidean plane, hyperbolic
plane, metric trees, tree x line) uniformly through a query oracle that
answers only "is d(x, y) <= 1" and certifiable derived relations, then
rebuilds distances from those answers: tapes of unit jumps in flat strips,
scissors translations along rank-one axes, horoball membership, and
Busemann bookkeeping.
"""

__version__ = "0.1.0"
