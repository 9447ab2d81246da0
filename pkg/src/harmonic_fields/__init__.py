"""Harmonic unit vector fields on 3-dimensional frame models."""
from .frame import FrameModel, ModelError
from .field import FieldAnalysis
from .classify import classify, milnor_type
from .finder import FinderConfig, find_all

__all__ = ["FrameModel", "ModelError", "FieldAnalysis", "classify", "milnor_type", "FinderConfig", "find_all"]
__version__ = "0.1.0"
