from .autodiff import Tensor
from .params import ParamSet
from .adam import AdamState, adam_step
from .encoders import (
    BowEncoder,
    ConvTextEncoder,
    EncoderConfig,
    Mlp,
    RnnEncoder,
    make_sequence_encoder,
)
from .gradcheck import grad_check
from .graphops import BACKEND, gather_segment_sum, neighbor_sum

__all__ = [
    "Tensor",
    "ParamSet",
    "AdamState",
    "adam_step",
    "BowEncoder",
    "ConvTextEncoder",
    "EncoderConfig",
    "Mlp",
    "RnnEncoder",
    "make_sequence_encoder",
    "grad_check",
    "BACKEND",
    "gather_segment_sum",
    "neighbor_sum",
]
