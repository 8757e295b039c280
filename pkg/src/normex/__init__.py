"""Checkable certificates for subnormality and normal extensions of
contractive semigroup representations on finite-dimensional complex spaces,
with the supporting lattice-ordered-semigroup algebra, Kolmogorov
factorization and convex averaging of dilation families."""

__version__ = "0.1.0"

from .errors import (
    CapExceededError,
    InputError,
    MembershipError,
    NormexError,
    NotHermitianError,
    NotPsdError,
    UnsupportedStructureError,
)
from .validation import ValidationCheck, ValidationVerdict
from .linalg import (
    DEFAULT_PSD_TOL,
    BlockDecomposition,
    CMatrix,
    PsdVerdict,
    adjoint,
    block_assemble,
    block_decompose,
    cmatrix,
    hermitian_eig,
    identity,
    loewner_leq,
    operator_norm,
    psd_check,
    zeros,
)
from .semigroups import (
    Factorization,
    GroupElement,
    SemigroupDescriptor,
    add,
    contains,
    element,
    factorization,
    factorize,
    free_abelian,
    indicator,
    infinite_power,
    leq,
    meet_join,
    neg,
    numerical,
    pos_neg_parts,
    product,
    rationals,
    sample_group,
    sample_member,
    sub,
    unit,
    validate_descriptor,
)
from .representations import (
    DEFAULT_REP_TOL,
    InvolutionPoint,
    NormalMap,
    Representation,
    eval_rep,
    involution_point,
    make_normal_map,
    make_representation,
    point_mul,
    product_of,
    star_kernel,
    tilde_eval,
    validate_normal_map,
    validate_rep,
)
from .certificates import (
    DEFAULT_MAX_DEGREE,
    DEFAULT_SUBSET_CAP,
    CertificateReport,
    DegreeTuple,
    SzNagyConfig,
    agler_certificate,
    athavale_certificate,
    athavale_vs_brehmer,
    box_operator,
    brehmer_certificate,
    brehmer_sum,
    degree_tuple,
    extension_residual,
    generator_certificate,
    regularity_check,
    sznagy_check,
)
from .constructions import (
    KOLMOGOROV_TOL,
    ConvexWeights,
    DilationFamily,
    convex_average,
    convex_weights,
    kolmogorov_factor,
    make_commuting_normals,
    make_dilation_family,
    make_gallery,
    make_orthogonal_defect_family,
    tinfty_eval,
    uniform_weights,
    validate_dilation_family,
)
from .cli import (
    RunConfig,
    RunReport,
    build_run_report,
    canonical_json,
    descriptor_from_json,
    descriptor_to_json,
    emit_report,
    matrix_from_json,
    matrix_to_json,
    parse_spec,
    run_command,
)
