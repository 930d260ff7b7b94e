"""Reconstruct finite CAT(0) cube complexes from boundary distances."""

from .complex import CubeComplex, DistanceMatrix, boundary_distance_matrix, build
from .iso import isomorphic_labeled
from .lowdim import reconstruct_2d, reconstruct_tree
from .reconstruct3d import reconstruct
from .validate import validate_cat0

__version__ = "0.1.0"

__all__ = [
    "CubeComplex",
    "DistanceMatrix",
    "boundary_distance_matrix",
    "build",
    "isomorphic_labeled",
    "reconstruct",
    "reconstruct_2d",
    "reconstruct_tree",
    "validate_cat0",
]
