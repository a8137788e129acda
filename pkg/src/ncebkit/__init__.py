"""Entropy-breaking quantum channels: conditional-entropy tests, dilations and thresholds."""

__version__ = "0.1.0"

from .channels import (  # noqa: F401
    KrausChannel,
    TransposeDepolarizing,
    apply,
    apply_to_B,
    choi,
    compose_parallel,
    compose_serial,
    depolarizing,
    depolarizing_keep,
    global_depolarizing,
    holevo_eb,
    identity_channel,
    mix,
    replacer,
    transpose_depolarizing,
    validate,
)
from .classify import (  # noqa: F401
    OptimizerConfig,
    Verdict,
    channel_coherent_info,
    is_a_unital,
    is_eb,
    is_mib,
    is_ncea,
    is_nceb,
    is_ppt_channel,
    threshold,
)
from .dilation import complementary, leak_report, stinespring  # noqa: F401
from .entropy import conditional_entropy, mutual_information, von_neumann  # noqa: F401
from .states import DensityOperator, alpha_state, bell_diagonal, max_entangled  # noqa: F401
