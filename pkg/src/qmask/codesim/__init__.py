"""Desk-scale simulation of the binning scheme for measurement channels with classical CSI."""

from .codebook import (
    Codebook,
    decode,
    encode_binning,
    generate_codebook,
    jointly_typical_check,
    typical_check,
)
from .encoders import BinningCode, LetterwiseEncoder
from .leakage import exact_leakage
from .model import ClassicalStrategy, check_channel_tensor, single_letter_prediction
from .simulate import SimConfig, SimResult, sample_channel, simulate

__all__ = [
    "BinningCode", "ClassicalStrategy", "Codebook", "LetterwiseEncoder", "SimConfig", "SimResult",
    "check_channel_tensor", "decode", "encode_binning", "exact_leakage", "generate_codebook",
    "jointly_typical_check", "sample_channel", "simulate", "single_letter_prediction", "typical_check",
]
