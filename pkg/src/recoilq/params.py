"""Nondimensionalized model parameters shared by every stage of the pipeline.

Internal unit system: hbar = c = omega0 = 1.  Everything else is expressed
relative to the qubit resonance: masses as m* = M c^2 / (hbar omega0),
lengths in c/omega0, times in 1/omega0.  The stationary-atom limit is the
distinguished value ``mstar = math.inf`` and is always handled by dedicated
closed forms, never by evaluating recoil terms at a huge float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as _C_LIGHT
from scipy.constants import hbar as _HBAR

INFINITE_MASS = math.inf


class ParameterError(ValueError):
    """Raised when a parameter set violates its invariants.

    ``violations`` lists every broken invariant, one message per field.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ModelParams:
    """Simulation inputs in internal units (hbar = c = omega0 = 1).

    mstar    : nondimensionalized mass M c^2/(hbar omega0); math.inf selects
               the stationary-atom closed forms
    lam      : coupling amplitude of the mode function lam/sqrt(omega_k)
    sigma    : initial wavepacket width in units of c/omega0
    cutoff   : sharp UV cutoff on |k| in units of omega0
    tmax     : evolution horizon in units of 1/omega0
    nsamples : number of time samples on (0, tmax]
    """

    mstar: float = INFINITE_MASS
    lam: float = 0.1
    sigma: float = 1.0
    cutoff: float = 50.0
    tmax: float = 40.0
    nsamples: int = 200
    omega0: float = 1.0

    @property
    def stationary(self) -> bool:
        return math.isinf(self.mstar)

    def with_mstar(self, mstar: float) -> "ModelParams":
        return replace(self, mstar=mstar)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises ParameterError listing each violated invariant with the field
    name and the bound it broke.
    """
    bad = []
    if not (params.mstar > 0):  # inf passes, nan/negative fail
        bad.append("mstar must be positive (or math.inf for the stationary limit)")
    if not (params.lam >= 0):
        bad.append("lam must be non-negative")
    if not (params.sigma > 0):
        bad.append("sigma must be positive")
    if not (params.cutoff > params.omega0):
        bad.append("cutoff must exceed omega0")
    if not (params.tmax > 0):
        bad.append("tmax must be positive")
    if params.nsamples < 2:
        bad.append("nsamples must be at least 2")
    if params.omega0 != 1.0:
        bad.append("omega0 is fixed to 1 in internal units")
    if bad:
        raise ParameterError(bad)
    return params


def nondimensionalize(
    mass_kg: float,
    omega0_rad_s: float,
    lambda_phys: float,
    sigma_m: float,
    cutoff_ratio: float,
    tmax: float = 40.0,
    nsamples: int = 200,
) -> ModelParams:
    """Convert laboratory inputs to internal units.

    mstar = M c^2/(hbar omega0); sigma is re-expressed in units of c/omega0;
    the cutoff is already given as a ratio Lambda/omega0.  The coupling is
    taken as the already-dimensionless amplitude of the interaction term.
    """
    inputs = {
        "mass_kg": mass_kg,
        "omega0_rad_s": omega0_rad_s,
        "lambda_phys": lambda_phys,
        "sigma_m": sigma_m,
        "cutoff_ratio": cutoff_ratio,
    }
    bad = [f"{name} must be positive" for name, val in inputs.items() if not (val > 0)]
    if bad:
        raise ParameterError(bad)
    mstar = mass_kg * _C_LIGHT**2 / (_HBAR * omega0_rad_s)
    sigma = sigma_m * omega0_rad_s / _C_LIGHT
    return validate(
        ModelParams(
            mstar=mstar,
            lam=lambda_phys,
            sigma=sigma,
            cutoff=cutoff_ratio,
            tmax=tmax,
            nsamples=nsamples,
        )
    )


@dataclass(frozen=True)
class Wavepacket:
    """Minimum-uncertainty Gaussian center-of-mass state, centered at rest."""

    sigma: float

    def amplitude(self, x):
        """Position amplitude pi^{-3/4} sigma^{-3/2} exp(-x^2/(2 sigma^2))."""
        return (
            math.pi ** (-0.75)
            * self.sigma ** (-1.5)
            * np.exp(-(x * x) / (2.0 * self.sigma**2))
        )

    def momentum_density(self, p):
        """|phi(p)|^2 for the Fourier-conjugate Gaussian of width 1/sigma."""
        return math.pi ** (-1.5) * self.sigma**3 * np.exp(-(p * p) * self.sigma**2)
