"""Figure rendering for function-evolution experiment CSV exports."""

from elaviz.figures import RENDERERS
from elaviz.projection import FrozenMap
from elaviz.schemas import SchemaError

__version__ = "0.1.0"

__all__ = ["RENDERERS", "FrozenMap", "SchemaError", "__version__"]
