"""Oja-flow opinion dynamics on the unit sphere: simulation and stability checks."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    PartitionSpec,
    angles,
    consensus_state,
    dissensus_state,
    gram,
    random_state,
    random_unit,
    renormalize,
    tangent_project,
)
from .spectral import Infeasible, covariance, design_constant_H, eig_sym, mean_opinion  # noqa: E402
from .dynamics import (  # noqa: E402
    AverageConsensus,
    OjaConstantH,
    OjaVaryingCovariance,
    beta_rhs,
    field,
    pca_control,
)
from .analysis import (  # noqa: E402
    classify,
    dissensus_closed_form,
    fd_jacobian,
    jacobian_Ai,
    lyap_consensus,
    lyap_three_agent,
    lyap_two_agent,
)
from .sim import IntegratorConfig, perturb_consensus, run, step  # noqa: E402
