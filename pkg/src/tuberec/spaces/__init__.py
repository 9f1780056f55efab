"""Model space registry."""
from __future__ import annotations

from .base import (COMPLETE, EXACT, FLOAT, Domain, DirectionAtPoint, Geodesic,
                   ModelSpace, NoGeodesic, SpaceError, SpaceMismatch,
                   UnsupportedOperation)
from .euclidean import EPoint, EIdeal, ELine, EuclideanPlane, PlaneChart
from .hyperbolic import HIdeal, HLine, HPoint, HyperbolicPlane
from .product import PGeodesic, PIdeal, PPoint, ProductChart, TreeCrossLine
from .tree import (DEFAULT_TREE_TEXT, MetricTree, TIdeal, TPath, TPoint,
                   default_tree, parse_tree)

SPACE_KINDS = ("euclidean_plane", "hyperbolic_plane", "metric_tree",
               "tree_cross_line")


def make_space(kind: str, tree_text: str | None = None) -> ModelSpace:
    """Build a model space by kind name; trees accept an optional description
    in the plain-text format (the default tree has two branch vertices and
    four ends)."""
    if kind == "euclidean_plane":
        return EuclideanPlane()
    if kind == "hyperbolic_plane":
        return HyperbolicPlane()
    if kind == "metric_tree":
        t = parse_tree(tree_text, "custom") if tree_text else default_tree()
        return t
    if kind == "tree_cross_line":
        t = parse_tree(tree_text, "custom") if tree_text else default_tree()
        return TreeCrossLine(t)
    raise ValueError(f"unknown space kind {kind!r}; choose from {SPACE_KINDS}")


__all__ = [
    "COMPLETE", "EXACT", "FLOAT", "Domain", "DirectionAtPoint", "Geodesic",
    "ModelSpace", "NoGeodesic", "SpaceError", "SpaceMismatch",
    "UnsupportedOperation", "EPoint", "EIdeal", "ELine", "EuclideanPlane",
    "PlaneChart", "HIdeal", "HLine", "HPoint", "HyperbolicPlane", "PGeodesic",
    "PIdeal", "PPoint", "ProductChart", "TreeCrossLine", "DEFAULT_TREE_TEXT",
    "MetricTree", "TIdeal", "TPath", "TPoint", "default_tree", "parse_tree",
    "SPACE_KINDS", "make_space",
]
