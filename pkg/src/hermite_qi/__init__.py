"""C1 cubic Hermite quasi-interpolation on the uniform three-direction mesh."""
from .masks import DEFAULT_LAMBDA, MaskSet, mask_set, validate
from .mesh import C, Ct, Lower, U, Upper, V, locate
from .quasi_interp import GridSpline, Spline, assemble, c1_audit, rect_region

__all__ = [
    "C", "Ct", "DEFAULT_LAMBDA", "GridSpline", "Lower", "MaskSet", "Spline", "U", "Upper", "V",
    "assemble", "c1_audit", "locate", "mask_set", "rect_region", "validate",
]
__version__ = "0.1.0"
