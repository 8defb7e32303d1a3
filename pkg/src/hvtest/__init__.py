"""Hidden-variable compatibility tests with verifiable certificates.

Decide whether observed statistics can come from a latent-variable model:
compile a sum-of-squares search for a separating hyperplane into a
semidefinite program, solve it, and emit a certificate any third party can
recheck by eigenvalue and identity-residual inspection alone.
"""

from .polynomial import Monomial, MonomialBasis, Polynomial
from .sdp_solver import SdpProblem, SdpSolution, SolverOptions, solve
from .sos_compiler import (
    CompileError,
    DomainError,
    GramBlock,
    ModelSpec,
    NoBoundAtDegree,
    SolverFailure,
    SosProgram,
    TestCertificate,
    Tolerances,
    VerificationReport,
    bound_observable,
    center_model,
    compile,
    extract_certificate,
    load_certificate,
    normalized_hyperplane,
    run_test,
    save_certificate,
    to_sdp,
    verify_certificate,
)
from .models import (
    time_shift_observable,
    build_chsh,
    build_coin,
    build_slh,
    chsh_observable,
)
from .simulator import (
    DirectedGraph,
    EmpiricalDistribution,
    InfluenceParams,
    gen_graph,
    load_distribution,
    load_edges,
    save_distribution,
    save_edges,
    simulate_network,
    simulate_pairwise,
)
from .stats import (
    ObservationVector,
    hoeffding_confidence,
    hoeffding_tail_log10,
    observable_range,
    project,
)

__version__ = "0.1.0"
