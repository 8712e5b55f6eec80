"""Closed forms for the straddling-interval statistics of drifted Brownian motion.

For unit-variance Brownian motion with drift beta, |beta| < alpha, the gap of
the contact set around the origin has explicitly known transforms:

* ``k_laplace``            Laplace transform of the gap length K
* ``lambda_ratio``         normalized Levy-measure transform
                           int (1-e^{-theta x}) dLambda / int x dLambda
* ``k_density_zero_drift`` density of K when beta = 0
* ``lambda_density_zero_drift``  normalized Levy-measure density, beta = 0
* ``h_density``            Gamma(2, 4 alpha) density of the apex gap H
* ``t_laplace``            two-sided Laplace transform of the apex time T
* ``s_laplace``, ``ttilde_laplace``   transforms of the two descent pieces
                           whose sum is distributed like the length-biased gap
* ``f_minus_laplace``, ``f_density_zero_drift``   joint law of the one-sided
                           minimum (time, depth) pair feeding the K formulas

Everything is normalized to sigma = 1; ``scale_to_unit_sigma`` documents the
change of variables that reduces the general case to this one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BrownianParams:
    """Slope bound alpha and drift beta with |beta| < alpha (sigma = 1)."""

    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive and finite")
        if not abs(self.beta) < self.alpha:
            raise ValueError("need |beta| < alpha strictly")


def scale_to_unit_sigma(alpha: float, beta: float, sigma: float):
    """Reduce variance sigma^2 to 1: t -> sigma^2 * t', value -> sigma^2 * v'.

    Both alpha (value/time) and beta are invariant under this rescale, so the
    unit-variance law applies verbatim; lengths K, T, L, R and heights H of
    the original problem are sigma^2 times the unit-variance ones.

    Returns (params, time_scale, value_scale).
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return BrownianParams(alpha=alpha, beta=beta), sigma**2, sigma**2


# ---------------------------------------------------------------------------
# Transforms of K and of the Levy measure of the contact-set subordinator
# ---------------------------------------------------------------------------


def k_laplace(p: BrownianParams, theta) -> float:
    """E[exp(-theta K)] for theta >= 0."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < 0):
        raise ValueError("theta must be >= 0")
    a, b = p.alpha, p.beta
    sp = np.sqrt(2 * theta + (a + b) ** 2)
    sm = np.sqrt(2 * theta + (a - b) ** 2)
    out = 8 * a * (a * a - b * b) * (1 / sp + 1 / sm) / (sp + sm + 2 * a) ** 2
    return float(out) if out.ndim == 0 else out


def lambda_ratio(p: BrownianParams, theta) -> float:
    """int (1 - e^{-theta x}) dLambda / int x dLambda, theta >= 0."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < 0):
        raise ValueError("theta must be >= 0")
    a, b = p.alpha, p.beta
    out = (
        4 * (a * a - b * b) * theta
        / ((np.sqrt(2 * theta + (a - b) ** 2) + a - b) * (np.sqrt(2 * theta + (a + b) ** 2) + a + b))
    )
    return float(out) if out.ndim == 0 else out


def k_density_zero_drift(alpha: float, kappa) -> float:
    """Density of K at kappa > 0 for beta = 0."""
    kappa = np.asarray(kappa, dtype=np.float64)
    if np.any(kappa <= 0):
        raise ValueError("kappa must be positive")
    a = alpha
    out = (4 * a**3 / SQRT_2PI) * np.sqrt(kappa) * np.exp(-a * a * kappa / 2) - (
        4 * a**4
    ) * kappa * norm.cdf(-a * np.sqrt(kappa))
    return float(out) if out.ndim == 0 else out


def k_cdf_zero_drift(alpha: float, kappa) -> float:
    """CDF of K for beta = 0, integrated in closed form from the density.

    With z = alpha * sqrt(kappa):
        F(kappa) = 2 (z^3 - z) phi(z) + 2 Phi(z) - 1 - 2 z^4 Phi(-z).
    """
    kappa = np.asarray(kappa, dtype=np.float64)
    z = alpha * np.sqrt(np.maximum(kappa, 0.0))
    phi = np.exp(-z * z / 2) / SQRT_2PI
    out = 2 * (z**3 - z) * phi + 2 * norm.cdf(z) - 1.0 - 2 * z**4 * norm.cdf(-z)
    out = np.where(kappa <= 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def k_ppf_zero_drift(alpha: float, q: float) -> float:
    """Quantile of K for beta = 0 (inverse of ``k_cdf_zero_drift``)."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly in (0, 1)")
    from scipy.optimize import brentq

    hi = 1.0 / alpha**2
    while k_cdf_zero_drift(alpha, hi) < q:
        hi *= 2.0
    return brentq(lambda k: k_cdf_zero_drift(alpha, k) - q, 1e-300, hi, xtol=1e-12)


def lambda_density_zero_drift(alpha: float, x) -> float:
    """Normalized Levy-measure density dLambda/Lambda(R+) at x > 0, beta = 0."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    a = alpha
    out = (2 * a / SQRT_2PI) * x**-0.5 * np.exp(-a * a * x / 2) - 2 * a * a * norm.cdf(
        -a * np.sqrt(x)
    )
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Apex statistics
# ---------------------------------------------------------------------------


def h_density(alpha: float, h) -> float:
    """Gamma(2, rate 4*alpha) density of the apex gap H."""
    h = np.asarray(h, dtype=np.float64)
    if np.any(h < 0):
        raise ValueError("h must be >= 0")
    out = (4 * alpha) ** 2 * h * np.exp(-4 * alpha * h)
    return float(out) if out.ndim == 0 else out


def h_moments(alpha: float) -> tuple[float, float]:
    """(mean, variance) of H: 1/(2 alpha), 1/(8 alpha^2)."""
    return 1.0 / (2 * alpha), 1.0 / (8 * alpha**2)


def p_t_positive(p: BrownianParams) -> float:
    """P{T > 0} = (1 + beta/alpha) / 2."""
    return 0.5 * (1.0 + p.beta / p.alpha)


def t_laplace(p: BrownianParams, theta: float) -> float:
    """E[exp(-theta T)] on the strip -(alpha-beta)^2/2 <= theta <= (alpha+beta)^2/2.

    theta = 0 is a removable singularity, evaluated by series.
    """
    a, b = p.alpha, p.beta
    lo, hi = -((a - b) ** 2) / 2, ((a + b) ** 2) / 2
    if not (lo <= theta <= hi):
        raise ValueError(f"theta must lie in [{lo:.6g}, {hi:.6g}]")
    pref = 8 * a * (a * a - b * b)
    if abs(theta) < 1e-7 * max(1.0, a * a):
        # bracket g(theta) vanishes linearly at 0: use a two-term expansion
        ap, am = a + b, a - b
        c1, c2 = 3 * a - b, 3 * a + b
        g1 = (1.0 / ap) / (4 * a) ** 2 + (1.0 / am) / (4 * a) ** 2
        g2_first = 1.0 / (ap**3 * (4 * a) ** 2) + 2.0 / (ap**2 * (4 * a) ** 3)
        g2_second = -1.0 / (am**3 * (4 * a) ** 2) - 2.0 / (am**2 * (4 * a) ** 3)
        g2 = g2_first + g2_second
        return pref * (g1 + 0.5 * g2 * theta)
    sa = math.sqrt((a + b) ** 2 - 2 * theta)
    sb = math.sqrt((a - b) ** 2 + 2 * theta)
    return pref / theta * (1.0 / (sa + 3 * a - b) - 1.0 / (sb + 3 * a + b))


# ---------------------------------------------------------------------------
# One-sided minima: transforms and densities
# ---------------------------------------------------------------------------


def s_laplace(p: BrownianParams, theta) -> float:
    """E[exp(-theta S)]: time of the global minimum of the downward-tilted path."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < 0):
        raise ValueError("theta must be >= 0")
    am = p.alpha - p.beta
    out = 2 * am / (np.sqrt(2 * theta + am * am) + am)
    return float(out) if out.ndim == 0 else out


def ttilde_laplace(p: BrownianParams, theta) -> float:
    """E[exp(-theta T~)]: argmin time of the upward-tilted post-S path."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < 0):
        raise ValueError("theta must be >= 0")
    ap = p.alpha + p.beta
    out = 2 * ap / (np.sqrt(2 * theta + ap * ap) + ap)
    return float(out) if out.ndim == 0 else out


def neg_inf_exp_rates(p: BrownianParams) -> tuple[float, float]:
    """Exponential rates of the one-sided tilted minima.

    -inf{X_t - alpha t : t <= 0} ~ Exp(2 (alpha - beta)) and
    -inf{X_t + alpha t : t >= 0} ~ Exp(2 (alpha + beta)).
    """
    return 2 * (p.alpha - p.beta), 2 * (p.alpha + p.beta)


def f_minus_laplace(p: BrownianParams, theta: float, h: float) -> float:
    """int f^-(xi, h) e^{-theta xi} dxi = 2(a-b) exp(h (sqrt(2 theta+(a-b)^2)+(a-b))).

    f^- is the joint density of (argmin time, min value <= 0) of the tilted
    negative-side path; h <= 0.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if h > 0:
        raise ValueError("h must be <= 0")
    am = p.alpha - p.beta
    return 2 * am * math.exp(h * (math.sqrt(2 * theta + am * am) + am))


def f_plus_laplace(p: BrownianParams, theta: float, h: float) -> float:
    """Positive-side analogue of ``f_minus_laplace`` (rate alpha + beta)."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if h > 0:
        raise ValueError("h must be <= 0")
    ap = p.alpha + p.beta
    return 2 * ap * math.exp(h * (math.sqrt(2 * theta + ap * ap) + ap))


def f_density_zero_drift(xi: float, h: float, alpha: float) -> float:
    """Joint density f(xi, h) of (argmin time, min value), beta = 0.

    f(xi, h) = (-2 alpha h / (sqrt(2 pi) xi^{3/2})) exp(-(alpha xi - h)^2 / (2 xi)),
    for xi > 0, h < 0.
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    if h >= 0:
        raise ValueError("h must be negative")
    return (-2 * alpha * h / (SQRT_2PI * xi**1.5)) * math.exp(
        -((alpha * xi - h) ** 2) / (2 * xi)
    )


# ---------------------------------------------------------------------------
# Fixed-contour numerical Laplace inversion (cross-check utility)
# ---------------------------------------------------------------------------


def invert_laplace_talbot(fhat, t: float, n_terms: int = 32) -> float:
    """Invert a Laplace transform at t > 0 on the fixed Talbot contour.

    Fixed-contour rule with r = 2 n / (5 t), contour s(phi) = r phi (cot phi
    + i) for phi in (0, pi):

        f(t) = (r/n) [ e^{rt} F(r) / 2
                       + sum_k Re( e^{t s_k} F(s_k) (1 + i sigma_k) ) ],
        sigma_k = phi_k + (phi_k cot phi_k - 1) cot phi_k.

    Double precision limits the achievable accuracy to roughly 1e-8; the
    declared cross-check target is 1e-3.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    n = int(n_terms)
    r = 2.0 * n / (5.0 * t)
    total = 0.5 * math.exp(r * t) * complex(fhat(complex(r, 0.0))).real
    for k in range(1, n):
        phi = k * math.pi / n
        cot = math.cos(phi) / math.sin(phi)
        s = r * phi * complex(cot, 1.0)
        sigma = phi + (phi * cot - 1.0) * cot
        total += (cmath.exp(s * t) * complex(fhat(s)) * complex(1.0, sigma)).real
    return (r / n) * total
