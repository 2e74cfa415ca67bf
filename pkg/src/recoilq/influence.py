"""Pole approximation and the decay amplitude u(x, t).

The resolvent 1/(z + i omega0 + mu~(z)) has a single O(lam^2) pole at
z0 = -i omega0 - mu~(-i omega0); exponentiating it gives the decay
amplitude u = exp(z0 t) that drives both reduced density-matrix elements.
The stationary atom bypasses the quadrature entirely through the
closed-form self-energy, which keeps log|u| exactly linear in t there.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .kernels import SelfEnergy, self_energy, self_energy_profile, stationary_self_energy


@dataclass(frozen=True)
class PoleResult:
    """O(lam^2) pole of the reduced-amplitude resolvent."""

    z0: complex
    self_energy: SelfEnergy
    order_tag: str = "lambda^2"


def pole(mstar, dx, t, lam, cutoff, **quad_opts) -> PoleResult:
    """z0 = -i omega0 - mu~_t(-i omega0), omega0 = 1 internally."""
    se = self_energy(mstar, dx, t, lam, cutoff, **quad_opts)
    return PoleResult(z0=-1j - se.value, self_energy=se)


def stationary_u(t, lam, cutoff) -> complex:
    """Decay amplitude of the stationary atom, exp(z0 t) with the exact
    closed-form self-energy; |u| = exp(-lam^2 omega0 t / (2 pi))."""
    if t <= 0:
        raise ValueError("stationary_u requires t > 0")
    return cmath.exp((-1j - stationary_self_energy(lam, cutoff)) * t)


def u_function(dx, t, mstar, lam, cutoff, **quad_opts) -> complex:
    """u(x, t) = exp(z0(x, t) t).

    The infinite-mass marker routes to the stationary closed form, which is
    independent of the displacement (recoil and displacement phases vanish
    with the concentrating propagator weight).
    """
    if t <= 0:
        raise ValueError("u_function requires t > 0")
    if np.isinf(mstar):
        return stationary_u(t, lam, cutoff)
    return cmath.exp(pole(mstar, dx, t, lam, cutoff, **quad_opts).z0 * t)


def u_profile(dx_values, t, mstar, lam, cutoff, **quad_opts):
    """u(x, t) for a batch of displacements on one shared k-grid.

    This is the workhorse for the Gaussian-convolution reduction: one
    adaptive quadrature serves every displacement node of a trajectory
    sample.
    """
    if t <= 0:
        raise ValueError("u_profile requires t > 0")
    dx_values = np.asarray(dx_values, dtype=float)
    if np.isinf(mstar):
        return np.full(len(dx_values), stationary_u(t, lam, cutoff), dtype=complex)
    mu, _ = self_energy_profile(mstar, t, lam, cutoff, dx_values, **quad_opts)
    return np.exp((-1j - mu) * t)
