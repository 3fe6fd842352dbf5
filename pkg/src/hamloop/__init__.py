"""Hamiltonian loops on R^4: flows, winding integrals, blow-up invariants,
and exact certificates for their orders in the fundamental group.

Numerical conventions used throughout: volume dV = omega0^2/2 and the
time-reversal Hamiltonian -H(2-t) on the second half of a loop.
"""

from .backend import backend_name
from .ballquad import ball_moment, quad_ball, quad_spacetime
from .exactpi import PiRat
from .flow import integrate, loop_closure, matrix_agreement, symplecticity
from .funcalg import TrigPoly
from .hamiltonian import (
    BumpProfile,
    HamiltonianField,
    loop_hamiltonian,
    path_field,
    quad_coeffs,
)
from .invariants import (
    BlowupModel,
    BlowupWeight,
    calabi_blowup,
    calabi_r4,
    hofer_lower_bound,
    normalization,
    rank_certificate,
    weinstein_numeric,
    weinstein_symbolic,
    winding,
)
from .periodlat import (
    Certificate,
    PeriodLattice,
    QPoly,
    QRatFunc,
    infinite_order,
    lemma_help_check,
    membership,
    pair_distinct,
    replay_certificate,
    weinstein_value,
)
from .unitary import LoopSpec, PathSpec, check_compatibility, eval_matrix, generator, realify

__version__ = "0.1.0"
