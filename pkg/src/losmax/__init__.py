"""Exact verification tools for a self-generating convex maximization problem.

The maximizer candidate alpha = (a_1, ..., a_n) comes from the integer
recurrence in :mod:`losmax.sequence`; :mod:`losmax.polytope` checks that it is
a vertex of the feasible polyhedron, :mod:`losmax.certificate` builds the dual
certificate, and :mod:`losmax.oracle` confirms global maximality by brute
force for small n.
"""

from .certificate import (
    Certificate,
    CertificateMatrix,
    DualityReport,
    LemmaTwoRecord,
    check_conjecture,
    d_coeff,
    duality_check,
    lemma_one_check,
    lemma_two_check,
    sweep,
    tail_bound_check,
    xstar_direct,
    xstar_solve,
)
from .oracle import BruteForceResult, ProbeReport, evaluate_f, global_max_bruteforce, local_probe
from .polytope import (
    GuardError,
    LinearConstraint,
    VertexReport,
    check_feasible,
    constraints_P,
    constraints_Q,
    enumerate_vertices,
    verify_alpha_feasible,
    verify_vertex,
)
from .sequence import LosTable, block, build_table

__all__ = [
    "BruteForceResult",
    "Certificate",
    "CertificateMatrix",
    "DualityReport",
    "GuardError",
    "LemmaTwoRecord",
    "LinearConstraint",
    "LosTable",
    "ProbeReport",
    "VertexReport",
    "block",
    "build_table",
    "check_conjecture",
    "check_feasible",
    "constraints_P",
    "constraints_Q",
    "d_coeff",
    "duality_check",
    "enumerate_vertices",
    "evaluate_f",
    "global_max_bruteforce",
    "lemma_one_check",
    "lemma_two_check",
    "local_probe",
    "sweep",
    "tail_bound_check",
    "verify_alpha_feasible",
    "verify_vertex",
    "xstar_direct",
    "xstar_solve",
]
