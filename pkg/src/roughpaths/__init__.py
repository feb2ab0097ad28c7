"""Computational rough-path analysis.

Truncated tensor algebra and signatures, p-variation and controls, rough
path metrics and the extension to higher degree, Lipschitz jets and one-form
integration, interval covers, and chart-wise rough paths on manifolds with
numerical consistency checking.
"""

from .covers import CompactCover, compose_covers, extract_subdivision, make_cover, refine_from_open_cover
from .errors import (
    CoverageGapError,
    DomainExitError,
    NonConvergenceError,
    RoughPathsError,
)
from .integration import (
    LocalOneForm,
    integrate,
    integrate_local_oneform,
    pushforward,
    rough_integral_level2,
    young_integral,
)
from .lipschitz import (
    LipJet,
    build_jet,
    componentwise_jet,
    compose_jets,
    constant_jet,
    constant_oneform,
    differential,
    identity_jet,
    image_pvar_bound,
    jet_linear_combination,
    linear_jet,
    lip_norm_estimate,
    polynomial_jet,
    rotation_oneform,
    taylor_remainder,
)
from .manifold import (
    Atlas,
    Chart,
    LocalItem,
    LocalRoughPath,
    build_atlas,
    circle_atlas,
    coloured_consistency_check,
    consistency_check,
    continuous_path_functor,
    equivalence_check,
    euclidean_atlas,
    lift_path,
    reconstruct,
    rough_path_functor,
    sphere_atlas,
    torus_atlas,
)
from .rough import (
    GridFunctional,
    RoughPath,
    concat_functionals,
    converges_in_topology,
    dp_metric,
    dp_product_metric,
    equivalent,
    evaluate,
    extend,
    from_bv_path,
    pvar_control_check,
    restrict,
)
from .signature import chen_check, concat_paths, factorial_decay_check, signature
from .tensor import (
    FormCombination,
    TruncTensor,
    admissible_norm,
    apply_form,
    permute_level,
    project,
    shuffle,
    tensor_exp,
    tensor_inverse,
    tensor_log,
    tensor_mul,
)
from .variation import (
    ControlGrid,
    SampledPath,
    Subdivision,
    beta_p,
    natural_control,
    neo_classical_check,
    p_variation,
    verify_controlled,
)

__version__ = "0.1.0"
