"""Kirkwood-Dirac representations of states, effects, channels and instruments."""

__version__ = "0.1.0"

from .config import Config, default_config
from .errors import (
    ConsistencyError,
    DimensionMismatchError,
    FrameChainError,
    KDError,
    OrthogonalPairError,
    OrthogonalPrePostError,
    OverlapFloorViolation,
    ValidationError,
)
from .frame import (
    BasisPair,
    KDFrame,
    build_frame,
    duality_matrix,
    frame_from_bases,
    sum_of_frame_preserves_trace,
    tensor_frame,
)
from .qops import (
    DensityOperator,
    KrausChannel,
    POVM,
    adjoint_channel,
    apply_channel,
    compose,
    sample,
    tensor,
    tensor_channel,
)
from .represent import (
    KDChannelMatrix,
    KDEffectVector,
    KDPoint,
    KDStateVector,
    predict,
    reconstruct_channel,
    reconstruct_effect,
    reconstruct_state,
    region_check,
    represent_channel,
    represent_effect,
    represent_state,
    weak_value,
)
from .search import (
    BasisParameterization,
    SearchConfig,
    SearchResult,
    decode,
    search_extremal,
    search_nonnegative,
)
from .verify import (
    CertificationReport,
    Fragment,
    Instrument,
    Member,
    NegativityReport,
    certify,
    negativity_measures,
    verify_identity_channel,
    verify_normalization,
    verify_parallel,
    verify_sequential,
    verify_swap,
)
