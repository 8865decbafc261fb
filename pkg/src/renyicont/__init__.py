"""Sandwiched Rényi conditional entropies, their continuity bounds, and verification campaigns."""

from ._kernels import BACKEND
from .bounds import (afw_limit_expression, afw_von_neumann, binary_entropy, bound_high, bound_hmin,
                     bound_jabbour_datta, bound_jabbour_datta_envelope, bound_low, bound_low_classical,
                     leditzky_gap, trivial_diameter)
from .entropy import (EntropyResult, RenyiOrder, SolverConfig, classical_conditional_entropy,
                      conditional_entropy, conditional_entropy_up, dual_order, duality_residual, hmax, hmin,
                      q_alpha, renyi_entropy, sandwiched_divergence, von_neumann_conditional, von_neumann_entropy)
from .errors import NumericalError, SolverError, ValidationError
from .harness import CampaignConfig, CampaignReport, SampleRecord, run_campaign, run_classical_campaign
from .states import (BipartiteState, PerturbationSpec, make_cq_state, max_entangled, perturb_within, product,
                     sample_random_state)

__version__ = "0.1.0"
