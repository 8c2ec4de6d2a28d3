"""degcount: exact, asymptotic and Monte-Carlo counting of graphs with a
prescribed degree sequence avoiding (or containing) a forbidden subgraph."""

from .graphcore import (
    DegreeSequence,
    ForbiddenGraph,
    InducedSpec,
    InputFormatError,
    Parameters,
    compute_parameters,
    induced_spec,
    read_degrees,
    read_edges,
    relabel,
    write_degrees,
    write_edges,
)
from .exactcount import (
    CountLimitError,
    UndefinedProbabilityError,
    complement_degrees,
    enumerate_count,
    exact_count,
    exact_overlap_distribution,
    exact_probability,
)
from .saddle import (
    AbgCoefficients,
    QuadratureError,
    SaddleDivergenceError,
    SaddlePoint,
    SaddlePoleError,
    abg_coefficients,
    fixed_radii_point,
    integral_quadrature,
    integrand_modulus,
    log_prefactor,
    solve_saddle,
)
from .asymptotics import (
    HypothesisFlag,
    LogEstimate,
    ValidityReport,
    check_hypotheses,
    dense_count_estimate,
    induced_estimate,
    lambda_jk_expansion,
    miss_hit_estimate,
    naive_estimate,
    overlap_distribution_estimate,
    regular_graph_expectations,
    sparse_estimates,
    specialized_estimates,
)
from .mvintegral import (
    CoefficientSet,
    DegenerateProposalError,
    MCBoxResult,
    gaussian_reference,
    mc_box_integral,
    theta1,
    theta1_terms,
    z_factor,
    z_factor_terms,
)
from .mcsampler import (
    DEFAULT_SEED,
    LabeledGraph,
    MCEstimate,
    NonGraphicalError,
    SampleConfig,
    estimate_probability,
    is_graphical,
    realize,
    switch_step,
)

__version__ = "0.1.0"
