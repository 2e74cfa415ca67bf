"""Qubit decoherence with quantized center-of-mass recoil."""

from .params import INFINITE_MASS, ModelParams, ParameterError, Wavepacket, nondimensionalize, validate

__all__ = [
    "INFINITE_MASS",
    "ModelParams",
    "ParameterError",
    "Wavepacket",
    "nondimensionalize",
    "validate",
]
