"""koszulkit: exact homological algebra over finite graded presentations."""

__version__ = "0.1.0"

from .linalg import Field, Matrix, QQ
from .orlov import (
    AddMorphism,
    AddObject,
    OrlovPresentation,
    compose,
    hom_basis,
    obj,
    split_idempotent,
    validate_presentation,
)
from .complexes import (
    ChainMap,
    Complex,
    HomClass,
    Homotopy,
    Triangle,
    cone,
    hom_space,
    is_null_homotopic,
    minimal_model,
    shift,
    support,
)
from .fixtures import load_fixture

__all__ = [
    "AddMorphism", "AddObject", "ChainMap", "Complex", "Field", "HomClass",
    "Homotopy", "Matrix", "OrlovPresentation", "QQ", "Triangle", "__version__",
    "compose", "cone", "hom_basis", "hom_space", "is_null_homotopic",
    "load_fixture", "minimal_model", "obj", "shift", "split_idempotent",
    "support", "validate_presentation",
]
