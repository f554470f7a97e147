"""Simulated quantum circuits for determinants, inverses, linear systems and
matrix products, with classical reference implementations and resource counts."""

from .det import DetRunResult, build_det_plan, run_determinant
from .errors import (CircuitConstructionError, EncodingError, MalformedInputError,
                     ParameterError, PostselectionError, QdlError, ResourceCapError,
                     ShapeError, SingularityError, SizeError)
from .inverse import InvRunResult, build_inverse_plan, embed_bordered, run_inverse
from .layout import RegisterLayout, build_layout, tilde_N
from .ledger import (ScaleLedger, encode_rhs, normalize_for_det, normalize_for_inverse,
                     normalize_for_matmul, recover_det, recover_inverse, recover_product,
                     recover_solution)
from .mulsolve import MulRunResult, SolveRunResult, run_matmul, run_solve
from .oracle import cofactor_inverse, leibniz_det, oracle_matmul, oracle_solve, permutation_parity
from .resources import ResourceReport, estimate, scaling_table
from .state import QuantumState, apply_layer, hadamard_project_zero, postselect

__version__ = "0.1.0"
