"""jetham: Hamiltonian structures for evolution PDEs via adjoint-linearization coverings."""

from .context import Context, ContextError, Decl, DEPENDENT, NONLOCAL, PARAMETER, EVEN, ODD
from .poly import Poly, GradeError
from .parser import ParseError, parse_expr

__version__ = "0.1.0"
