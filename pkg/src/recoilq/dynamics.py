"""Reduced density-matrix evolution by Gaussian-wavepacket convolution.

Tracing the propagator pair against the initial minimum-uncertainty
wavepacket reduces both matrix elements to one radial integral

    rho_10(t)/rho_10(0) = (4/sqrt(pi)) a^{3/2} int_0^inf x^2 u(x,t) e^{-a x^2} dx
    rho_11(t)/rho_11(0) = same with u -> conj(u) u

with the complex scale a = (m sigma)^2 / (t^2 - 2 i m sigma^2 t).  Because a
is complex the weight both decays (width Re(a)^{-1/2}) and oscillates; at
early times it is almost a pure Fresnel phase and acts as a nascent delta.
The integral is therefore done in closed form against the cubic spline of
u(x, t): piecewise Gaussian moments int x^n e^{-a x^2} dx (n <= 5) via the
complex error function, plus an analytic constant-u tail.  This reproduces
the weight-normalization identity to machine precision at every (t, m,
sigma), which is the anchor the whole reduction leans on.

u(x, t) itself costs a double quadrature per point, so it is evaluated on a
coarse 32-node displacement grid per time sample and splined; doubling the
grid is the documented convergence check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erfc

from .influence import stationary_u, u_profile
from .params import ModelParams, validate

_SQRT_PI = math.sqrt(math.pi)

#: displacement nodes per time sample; doubling this is the convergence check
X_GRID_SIZE = 32


@dataclass(frozen=True)
class Trajectory:
    """Time series of the reduced qubit elements, rho(0)-normalized."""

    times: np.ndarray
    rho10: np.ndarray
    rho11: np.ndarray
    params: ModelParams


def gaussian_weight(t, mstar, sigma):
    """Complex Gaussian scale a = (m sigma)^2 / (t^2 - 2 i m sigma^2 t).

    Re(a) > 0 for every t > 0, which makes the weight integrable; the
    principal branch of a^{3/2} (used in the prefactor) is continuous from
    t -> 0+ where a ~ i m/(2t) turns the weight into a nascent delta.
    """
    if t <= 0:
        raise ValueError("gaussian_weight requires t > 0")
    if np.isinf(mstar):
        raise ValueError("gaussian_weight requires finite mstar")
    return mstar**2 * sigma**2 / (t * t - 2j * mstar * sigma**2 * t)


def weight_prefactor(a):
    """(4/sqrt(pi)) a^{3/2} on the principal branch."""
    return 4.0 / _SQRT_PI * np.exp(1.5 * np.log(complex(a)))


def _gaussian_moments(a, edges):
    """M_n = int_{x_i}^{x_{i+1}} x^n e^{-a x^2} dx for n = 0..5, per piece.

    Stable recursion seeded by the complex error function; erfc is kept in
    its scaled regime because Re(a) x^2 <= 64 on the grid this module
    builds.  Returns an array of shape (6, npieces).
    """
    edges = np.asarray(edges, dtype=float)
    ra = np.sqrt(complex(a))  # Re > 0 since |arg a| < pi/2
    expo = np.exp(-a * edges**2)
    cerf = erfc(ra * edges)
    m = np.empty((6, len(edges) - 1), dtype=complex)
    m[0] = _SQRT_PI / (2.0 * ra) * (cerf[:-1] - cerf[1:])
    m[1] = (expo[:-1] - expo[1:]) / (2.0 * a)
    bnd = edges[:, None] ** np.arange(1, 5)[None, :] * expo[:, None]
    for n in range(2, 6):
        m[n] = ((n - 1) * m[n - 2] + bnd[:-1, n - 2] - bnd[1:, n - 2]) / (2.0 * a)
    return m


def _tail_moment2(a, x_last):
    """int_X^inf x^2 e^{-a x^2} dx."""
    ra = np.sqrt(complex(a))
    e = np.exp(-a * x_last**2)
    m0 = _SQRT_PI / (2.0 * ra) * erfc(ra * x_last)
    return (m0 + x_last * e) / (2.0 * a)


def _convolve_spline(a, spline, x_nodes, f_last):
    """N_a int_0^inf x^2 S(x) e^{-a x^2} dx, S cubic on the grid and the
    constant f_last beyond it."""
    coef = spline.c  # (4, npieces), S = sum_m coef[m] (x - x_i)^(3-m)
    x_lo = x_nodes[:-1]
    moments = _gaussian_moments(a, x_nodes)
    total = 0.0 + 0.0j
    # expand (x - x_i)^p x^2 onto monomial moments
    for mrow in range(4):
        p = 3 - mrow
        c = coef[mrow]
        for q in range(p + 1):
            binom = math.comb(p, q) * (-1.0) ** (p - q)
            total += np.sum(c * binom * x_lo ** (p - q) * moments[q + 2])
    total += f_last * _tail_moment2(a, x_nodes[-1])
    return weight_prefactor(a) * total


def _displacement_grid(a, size):
    """Uniform displacement nodes covering the weight's decay width.

    u(x, t) is flat near zero and carries a localized light-cone feature
    around x ~ t, so uniform coverage refined by the midpoint test beats
    any fixed geometric clustering.
    """
    x_max = 8.0 / math.sqrt(a.real)
    return np.linspace(0.0, x_max, size)


def _even_spline(x_nodes, values):
    # u is even in the displacement, so clamp the slope at x = 0
    return CubicSpline(x_nodes, values, bc_type=((1, 0.0), "not-a-knot"))


def _refine_grid(x_nodes, u, weight_fn, eval_fn, tol, max_rounds=6):
    """Insert midpoints where the spline misses fresh u-values, weighted by
    how much the convolution can see that region.  After the first sweep
    only intervals touched by a split are re-examined."""
    suspects = np.ones(len(x_nodes) - 1, dtype=bool)
    for _ in range(max_rounds):
        spline = _even_spline(x_nodes, u)
        mids = 0.5 * (x_nodes[:-1] + x_nodes[1:])
        idx = np.where(suspects)[0]
        if len(idx) == 0:
            break
        u_mid = eval_fn(mids[idx])
        err = np.abs(spline(mids[idx]) - u_mid) * weight_fn(mids[idx])
        bad = err > tol
        if not np.any(bad):
            break
        x_all = np.concatenate([x_nodes, mids[idx[bad]]])
        u_all = np.concatenate([u, u_mid[bad]])
        order = np.argsort(x_all)
        x_nodes, u = x_all[order], u_all[order]
        # children of every split interval (and their neighbors) stay suspect
        split_pos = np.searchsorted(x_nodes, mids[idx[bad]])
        suspects = np.zeros(len(x_nodes) - 1, dtype=bool)
        for pos in split_pos:
            lo = max(pos - 2, 0)
            suspects[lo : min(pos + 2, len(suspects))] = True
    return x_nodes, u


def _reduced_pair(t, params, *, x_grid_size=None, quad_opts=None, refine_tol=3e-8):
    """(rho10, rho11) at one time, sharing a single u-profile."""
    if np.isinf(params.mstar):
        u = stationary_u(t, params.lam, params.cutoff)
        return u, complex(abs(u) ** 2)
    a = gaussian_weight(t, params.mstar, params.sigma)
    x_nodes = _displacement_grid(a, x_grid_size or X_GRID_SIZE)
    opts = quad_opts or {}

    def eval_u(xs):
        return u_profile(xs, t, params.mstar, params.lam, params.cutoff, **opts)

    norm = abs(weight_prefactor(a))

    def relevance(xs):
        return norm * xs**2 * np.exp(-a.real * xs**2)

    u = eval_u(x_nodes)
    if params.lam > 0.0:
        x_nodes, u = _refine_grid(x_nodes, u, relevance, eval_u, refine_tol)
    spline_u = _even_spline(x_nodes, u)
    spline_p = _even_spline(x_nodes, np.abs(u) ** 2)
    rho10 = _convolve_spline(a, spline_u, x_nodes, u[-1])
    rho11 = _convolve_spline(a, spline_p, x_nodes, abs(u[-1]) ** 2)
    return rho10, rho11


def coherence(t, params, **opts) -> complex:
    """Off-diagonal evolution factor rho_10(t)/rho_10(0).

    Reduces exactly to the stationary decay amplitude when u does not
    depend on the displacement (weight normalization is exactly one).
    """
    validate(params)
    if t <= 0:
        raise ValueError("coherence requires t > 0")
    return complex(_reduced_pair(t, params, **opts)[0])


def population(t, params, **opts) -> float:
    """Diagonal evolution factor rho_11(t)/rho_11(0).

    The integrand conj(u) u is real, so the imaginary remainder left by the
    complex weight measures the reduction's own consistency; it is discarded
    here and asserted small in the test suite.
    """
    validate(params)
    if t <= 0:
        raise ValueError("population requires t > 0")
    return float(_reduced_pair(t, params, **opts)[1].real)


def evolve(params, *, quad_opts=None) -> Trajectory:
    """Sample both reduced elements on the parameter grid.

    Times are the nsamples right-endpoints of (0, tmax]; each sample shares
    one displacement profile between the two elements.
    """
    validate(params)
    times = np.linspace(
        params.tmax / params.nsamples, params.tmax, params.nsamples
    )
    rho10 = np.empty(len(times), dtype=complex)
    rho11 = np.empty(len(times))
    for i, t in enumerate(times):
        r10, r11 = _reduced_pair(float(t), params, quad_opts=quad_opts)
        rho10[i] = r10
        rho11[i] = r11.real
    return Trajectory(times=times, rho10=rho10, rho11=rho11, params=params)
