"""
Linear relations between finite-dimensional spaces carrying a nondegenerate pairing.

Gap metrics, Omega-adjoints, symplectic classification, Morse and Witt indices,
the Cayley parameterization of skew-adjoint relations and executable
certifiers for the associated stability statements.
"""

__version__ = "1.0.0"

from linrel.cayley import CayleyData, cayley_forward, cayley_inverse, connect, random_skew_adjoint  # noqa: E402
from linrel.forms import Form, annihilator, graph_symplectic, make_form  # noqa: E402
from linrel.morse import SymmetricPair, c_gap_bounds, perturbed_morse_certify, witt_parity  # noqa: E402
from linrel.relations import Relation, classify_symmetry, index_and_parity, omega_adjoint  # noqa: E402
from linrel.subspace import Subspace, gap_metrics, pair_index, span  # noqa: E402
from linrel.symplectic import classify_subspace, reduce, transversal_split  # noqa: E402
