"""Homological and extension dimensions of finite extriangulated category models."""

from .core import CategoryModel, Conflation, Obj, Subcat, Universe, close_table, make_category
from .errors import ExdimError
from .extdim import ext_dim, level
from .formats import load_category, load_recollement
from .homdim import DimValue, gl, pd, projectives
from .recollement import RecollementModel, audit_recollement, verify_extdim_bounds, verify_gl_bounds

__version__ = "0.1.0"

__all__ = [
    "CategoryModel", "Conflation", "DimValue", "ExdimError", "Obj", "RecollementModel", "Subcat", "Universe",
    "audit_recollement", "close_table", "ext_dim", "gl", "level", "load_category", "load_recollement",
    "make_category", "pd", "projectives", "verify_extdim_bounds", "verify_gl_bounds",
]
