"""Nilpotent cones of classical dual Lie algebras over finite fields.

Exact, exhaustive computation: finite-field arithmetic, symplectic and
orthogonal Lie algebras with their duals, quadratic forms as coordinates on
the dual of sp(V), the partition of the nilpotent forms into pieces, and
counting engines that check the resulting point counts.
"""

from . import census, classical, forms, gf, linalg, pieces
from .census import CountReport, count_nilpotent, piece_census, poly_fit
from .classical import LieAlgebra, build_algebra, num_roots
from .errors import NilconeError
from .forms import QuadForm, good_basis, polarize
from .gf import FieldDesc, extend, field_of_order, make_field
from .linalg import Subspace
from .pieces import Filtration, PieceLabel, SGoodGrading, classify, membership

__version__ = "0.1.0"

__all__ = [
    "census",
    "classical",
    "forms",
    "gf",
    "linalg",
    "pieces",
    "CountReport",
    "count_nilpotent",
    "piece_census",
    "poly_fit",
    "LieAlgebra",
    "build_algebra",
    "num_roots",
    "NilconeError",
    "QuadForm",
    "good_basis",
    "polarize",
    "FieldDesc",
    "extend",
    "field_of_order",
    "make_field",
    "Subspace",
    "Filtration",
    "PieceLabel",
    "SGoodGrading",
    "classify",
    "membership",
]
