"""Seeded simulation of two-sided Levy paths on a uniform grid.

Models are generative: X_t = drift*t + sigma*B_t + jumps, with the jump part
either absent, compound Poisson with one of three laws, or a symmetric stable
process with index in (1, 2) (so E|X_1| is finite).  The two-sided path is
built from two independent one-sided increment streams; the negative half is
the negated running sum of the second stream, which reproduces the correct
joint law of the grid skeleton with X_0 = 0.

Randomness comes from counter-based Philox streams keyed by
(seed, replicate_id, side, channel), so replicates are independent and any
path is reproducible in isolation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate
from scipy.stats import norm, poisson

from .path_core import CadlagPath

HARD_GRID_CAP = 1 << 26  # samples per side


class ModelError(ValueError):
    """Invalid model specification."""


class InversionError(RuntimeError):
    """Characteristic-function inversion failed to reach the accuracy target."""


# ---------------------------------------------------------------------------
# Jump specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoPointJumps:
    """Jumps of size ``up`` with probability ``p_up`` else ``down``."""

    up: float = 1.0
    down: float = -1.0
    p_up: float = 0.5

    def validate(self):
        if not (0.0 <= self.p_up <= 1.0):
            raise ModelError("p_up must lie in [0, 1]")
        if self.up == self.down:
            raise ModelError("two-point law needs distinct atoms")

    @property
    def mean(self) -> float:
        return self.p_up * self.up + (1.0 - self.p_up) * self.down

    def cf(self, theta):
        return self.p_up * np.exp(1j * theta * self.up) + (1.0 - self.p_up) * np.exp(
            1j * theta * self.down
        )

    def sample(self, n, rng):
        picks = rng.random(n) < self.p_up
        return np.where(picks, self.up, self.down)


@dataclass(frozen=True)
class GaussianJumps:
    mean_jump: float = 0.0
    std: float = 1.0

    def validate(self):
        if self.std <= 0:
            raise ModelError("gaussian jump std must be positive")

    @property
    def mean(self) -> float:
        return self.mean_jump

    def cf(self, theta):
        return np.exp(1j * theta * self.mean_jump - 0.5 * (theta * self.std) ** 2)

    def sample(self, n, rng):
        return rng.normal(self.mean_jump, self.std, size=n)


@dataclass(frozen=True)
class SymmetricExponentialJumps:
    """Two-sided exponential (Laplace) jump sizes with the given scale."""

    scale: float = 1.0

    def validate(self):
        if self.scale <= 0:
            raise ModelError("exponential jump scale must be positive")

    @property
    def mean(self) -> float:
        return 0.0

    def cf(self, theta):
        return 1.0 / (1.0 + (theta * self.scale) ** 2)

    def sample(self, n, rng):
        return rng.laplace(0.0, self.scale, size=n)


JumpLaw = Union[TwoPointJumps, GaussianJumps, SymmetricExponentialJumps]


@dataclass(frozen=True)
class CompoundPoisson:
    rate: float
    law: JumpLaw

    def validate(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ModelError("compound Poisson rate must be positive and finite")
        self.law.validate()


@dataclass(frozen=True)
class SymmetricStable:
    """Symmetric stable jumps, cf exp(-t * (scale*|theta|)**index), index in (1,2)."""

    index: float
    scale: float = 1.0

    def validate(self):
        if not (1.0 < self.index < 2.0):
            raise ModelError("stable index must lie strictly in (1, 2)")
        if self.scale <= 0:
            raise ModelError("stable scale must be positive")


Jumps = Union[CompoundPoisson, SymmetricStable, None]


@dataclass(frozen=True)
class LevyModel:
    """Gaussian variance, linear drift, and an optional jump component.

    ``drift`` is the bounded-variation drift coefficient d when sigma2 == 0
    and jumps are of finite activity, and the plain linear coefficient of the
    generative decomposition otherwise.
    """

    sigma2: float = 0.0
    drift: float = 0.0
    jumps: Jumps = None

    def __post_init__(self):
        if not (self.sigma2 >= 0 and math.isfinite(self.sigma2)):
            raise ModelError("sigma2 must be finite and >= 0")
        if not math.isfinite(self.drift):
            raise ModelError("drift must be finite")
        if self.jumps is not None:
            self.jumps.validate()
        if self.sigma2 == 0 and self.jumps is None and self.drift == 0:
            raise ModelError("degenerate model: zero process")

    # -- structural queries used by the criteria module --------------------

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def has_gaussian_part(self) -> bool:
        return self.sigma2 > 0

    @property
    def jump_activity(self) -> float:
        """Total mass of the jump measure (may be inf)."""
        if self.jumps is None:
            return 0.0
        if isinstance(self.jumps, CompoundPoisson):
            return self.jumps.rate
        return math.inf

    @property
    def bounded_variation(self) -> bool:
        return self.sigma2 == 0 and not isinstance(self.jumps, SymmetricStable)

    @property
    def mean_rate(self) -> float:
        """E[X_1]; finite for every representable model."""
        mean = self.drift
        if isinstance(self.jumps, CompoundPoisson):
            mean += self.jumps.rate * self.jumps.law.mean
        return mean


@dataclass(frozen=True)
class SimConfig:
    """Window [-window, window], uniform step dt, and the stream key."""

    window: float
    dt: float
    seed: int
    replicate_id: int = 0

    def __post_init__(self):
        if self.window <= 0 or self.dt <= 0:
            raise ModelError("window and dt must be positive")
        n = self.window / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ModelError("window must be an integer multiple of dt")
        if round(n) > HARD_GRID_CAP:
            raise ModelError(f"grid of {round(n)} samples per side exceeds the cap")

    @property
    def steps_per_side(self) -> int:
        return int(round(self.window / self.dt))


# ---------------------------------------------------------------------------
# RNG streams
# ---------------------------------------------------------------------------

_CH_GAUSS, _CH_COUNT, _CH_SIZE, _CH_STABLE = 0, 1, 2, 3


def stream(seed: int, replicate_id: int, side: int, channel: int) -> np.random.Generator:
    """Independent Philox stream for one (replicate, side, channel) slot."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                spawn_key=(int(replicate_id), int(side), int(channel)))
    return np.random.Generator(np.random.Philox(ss))


def standard_symmetric_stable(index: float, size: int, rng: np.random.Generator):
    """Exact symmetric stable variates, cf exp(-|theta|**index).

    Polar construction: with U uniform on (-pi/2, pi/2) and E standard
    exponential,

        sin(index*U) / cos(U)**(1/index)
            * (cos((1-index)*U) / E) ** ((1-index)/index).
    """
    u = rng.uniform(-np.pi / 2, np.pi / 2, size=size)
    e = rng.standard_exponential(size=size)
    a = index
    return (
        np.sin(a * u)
        / np.cos(u) ** (1.0 / a)
        * (np.cos((1.0 - a) * u) / e) ** ((1.0 - a) / a)
    )


def _one_side_cells(model: LevyModel, n: int, dt: float, rngs) -> tuple:
    """Per-cell increments and per-cell jump sums for one stream."""
    inc = np.full(n, model.drift * dt)
    if model.sigma2 > 0:
        inc += math.sqrt(model.sigma2 * dt) * rngs[_CH_GAUSS].standard_normal(n)
    jump_sums = None
    if isinstance(model.jumps, CompoundPoisson):
        counts = rngs[_CH_COUNT].poisson(model.jumps.rate * dt, size=n)
        total = int(counts.sum())
        jump_sums = np.zeros(n)
        if total:
            sizes = model.jumps.law.sample(total, rngs[_CH_SIZE])
            csum = np.concatenate(([0.0], np.cumsum(sizes)))
            bounds = np.concatenate(([0], np.cumsum(counts)))
            jump_sums = csum[bounds[1:]] - csum[bounds[:-1]]
        inc += jump_sums
    elif isinstance(model.jumps, SymmetricStable):
        z = standard_symmetric_stable(model.jumps.index, n, rngs[_CH_STABLE])
        inc += (dt ** (1.0 / model.jumps.index)) * model.jumps.scale * z
    return inc, jump_sums


def simulate_path(model: LevyModel, cfg: SimConfig) -> CadlagPath:
    """Two-sided grid path with X_0 = 0 and exact per-cell marginal laws.

    Compound Poisson events are snapped to the right endpoint of their cell
    and the pre-jump level is recorded as the left limit there (an O(dt)
    placement bias, documented and accepted).
    """
    n = cfg.steps_per_side
    dt = cfg.dt
    rngs_pos = [stream(cfg.seed, cfg.replicate_id, 0, c) for c in range(4)]
    rngs_neg = [stream(cfg.seed, cfg.replicate_id, 1, c) for c in range(4)]

    inc_pos, jumps_pos = _one_side_cells(model, n, dt, rngs_pos)
    inc_neg, jumps_neg = _one_side_cells(model, n, dt, rngs_neg)

    pos_vals = np.cumsum(inc_pos)
    neg_vals = -np.cumsum(inc_neg)  # value at time -(k+1)*dt is -sum of k+1 cells

    times = (np.arange(2 * n + 1) - n) * dt
    values = np.concatenate([neg_vals[::-1], [0.0], pos_vals])

    left = None
    if isinstance(model.jumps, CompoundPoisson):
        left = np.full(2 * n + 1, np.nan)
        jp = jumps_pos != 0.0
        if jp.any():
            idx = n + 1 + np.flatnonzero(jp)
            left[idx] = values[idx] - jumps_pos[jp]
        jn = jumps_neg != 0.0
        if jn.any():
            # negative-side grid point for stream cell k sits at index n-1-k;
            # the sample pair there is {-post, -pre}, recorded as value/left.
            idx = n - 1 - np.flatnonzero(jn)
            left[idx] = values[idx] + jumps_neg[jn]
        if not np.any(~np.isnan(left)):
            left = None

    return CadlagPath(times=times, values=values, left_values=left, origin_index=n)


# ---------------------------------------------------------------------------
# Analytic accessors
# ---------------------------------------------------------------------------


def eval_mean(model: LevyModel) -> float:
    """E[X_1]."""
    return model.mean_rate


def eval_psi(model: LevyModel, theta):
    """Characteristic exponent: E[exp(i theta X_t)] = exp(-t Psi(theta))."""
    theta = np.asarray(theta, dtype=np.float64)
    psi = -1j * model.drift * theta + 0.5 * model.sigma2 * theta**2
    if isinstance(model.jumps, CompoundPoisson):
        psi = psi + model.jumps.rate * (1.0 - model.jumps.law.cf(theta))
    elif isinstance(model.jumps, SymmetricStable):
        psi = psi + (model.jumps.scale * np.abs(theta)) ** model.jumps.index
    return complex(psi) if psi.ndim == 0 else psi


def _poisson_support(mu: float, tail: float = 1e-13) -> np.ndarray:
    hi = int(poisson.ppf(1.0 - tail, mu)) + 1 if mu > 0 else 0
    return np.arange(hi + 1)


def _sin_transform(env, freq: float, u_max: float) -> tuple[float, float]:
    """integral of env(u) * sin(freq*u) / u over (0, u_max), with error estimate.

    ``env`` must be real, nonnegative and decreasing; the head below one
    period is integrated plainly, the rest with the oscillatory QAWO rule.
    """
    if freq == 0.0:
        return 0.0, 0.0
    sgn = 1.0 if freq > 0 else -1.0
    fa = abs(freq)

    def g(u):
        return env(u) * math.sin(fa * u) / u if u > 0 else fa * env(0.0)

    u0 = min(u_max, 2.0 * math.pi / fa)
    head, err_h = integrate.quad(g, 0.0, u0, limit=200)
    if u0 >= u_max:
        return sgn * head, err_h
    osc, err_o = integrate.quad(
        lambda u: env(u) / u, u0, u_max, weight="sin", wvar=fa, limit=600
    )
    return sgn * (head + osc), err_h + err_o


def _gil_pelaez_real_env(env, loc: float, c: float, d: float, abs_tol: float = 1e-8):
    """P{c <= X <= d} for a law with cf env(u) * exp(i*u*loc), env real.

    The inversion integral reduces to two sine transforms.  The truncation
    point is grown until the integration-by-parts tail bound env(U)/(|f| U)
    falls below the target; failure to converge raises InversionError.
    """
    f1, f2 = loc - c, loc - d
    fmin = min((abs(f) for f in (f1, f2) if f != 0.0), default=0.0)
    if fmin == 0.0 and f1 == f2 == 0.0:
        return 0.0
    u_max, tail = 64.0, math.inf
    while u_max < 1e9:
        tail = 2.0 * env(u_max) / (max(fmin, 1e-6) * u_max)
        if tail <= 0.25 * abs_tol:
            break
        u_max *= 2.0
    else:
        raise InversionError(
            f"cf envelope decays too slowly: tail bound {tail:.2e} at u=1e9"
        )
    v1, e1 = _sin_transform(env, f1, u_max)
    v2, e2 = _sin_transform(env, f2, u_max)
    err = e1 + e2 + tail
    if err > max(abs_tol, 1e-6):
        raise InversionError(f"cf inversion error estimate {err:.2e} exceeds target")
    return (v1 - v2) / math.pi


def marginal_interval_prob(model: LevyModel, t: float, a: float, b: float) -> float:
    """P{X_t in [a*t, b*t]} by the tightest analytic route available.

    Closed Gaussian forms for Brownian motion with drift, Poisson mixtures for
    compound Poisson parts with two-point or Gaussian laws, and numeric
    characteristic-function inversion otherwise (InversionError on failure).
    """
    if a > b:
        raise ValueError("need a <= b")
    if t <= 0:
        raise ValueError("t must be positive")
    c, d = a * t, b * t
    sig2t = model.sigma2 * t
    dloc = model.drift * t

    if model.jumps is None:
        if model.sigma2 > 0:
            s = math.sqrt(sig2t)
            return float(norm.cdf((d - dloc) / s) - norm.cdf((c - dloc) / s))
        return float(c <= dloc <= d)

    if isinstance(model.jumps, CompoundPoisson):
        lam = model.jumps.rate
        law = model.jumps.law
        if isinstance(law, TwoPointJumps):
            mu_up, mu_dn = lam * law.p_up * t, lam * (1 - law.p_up) * t
            iu = _poisson_support(mu_up)
            jd = _poisson_support(mu_dn)
            pi = poisson.pmf(iu, mu_up)[:, None] * poisson.pmf(jd, mu_dn)[None, :]
            loc = dloc + law.up * iu[:, None] + law.down * jd[None, :]
            if model.sigma2 > 0:
                s = math.sqrt(sig2t)
                mass = norm.cdf((d - loc) / s) - norm.cdf((c - loc) / s)
            else:
                mass = (loc >= c) & (loc <= d)
            return float(np.sum(pi * mass))
        if isinstance(law, GaussianJumps):
            mu = lam * t
            ns = _poisson_support(mu)
            pn = poisson.pmf(ns, mu)
            loc = dloc + ns * law.mean_jump
            var = sig2t + ns * law.std**2
            out = 0.0
            if var[0] == 0.0:  # n = 0 atom when sigma2 == 0
                out += pn[0] * float(c <= loc[0] <= d)
                ns, pn, loc, var = ns[1:], pn[1:], loc[1:], var[1:]
            s = np.sqrt(var)
            out += float(np.sum(pn * (norm.cdf((d - loc) / s) - norm.cdf((c - loc) / s))))
            return out
        # symmetric exponential sizes: invert the cf, whose modulus is real
        # after factoring out the exp(i*u*drift*t) rotation
        sc = law.scale
        if model.sigma2 > 0:
            env = lambda u: math.exp(
                -0.5 * sig2t * u * u - lam * t * (1.0 - 1.0 / (1.0 + (u * sc) ** 2))
            )
            p = _gil_pelaez_real_env(env, dloc, c, d)
        else:
            # subtract the no-jump atom so the envelope decays like u^-2
            atom = math.exp(-lam * t)
            env = lambda u: math.exp(
                -lam * t * (1.0 - 1.0 / (1.0 + (u * sc) ** 2))
            ) - atom
            p = _gil_pelaez_real_env(env, dloc, c, d)
            if c <= dloc <= d:
                p += atom
        return float(min(max(p, 0.0), 1.0))

    # symmetric stable jumps: fully continuous marginal
    st = model.jumps
    env = lambda u: math.exp(
        -0.5 * sig2t * u * u - t * (st.scale * u) ** st.index
    )
    p = _gil_pelaez_real_env(env, dloc, c, d)
    return float(min(max(p, 0.0), 1.0))


def marginal_interval_prob_mc(
    model: LevyModel, t: float, a: float, b: float, n: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of P{X_t in [a*t, b*t]} with its standard error."""
    if a > b:
        raise ValueError("need a <= b")
    cfg_like_rngs = [stream(seed, 0, 0, ch) for ch in range(4)]
    x = np.full(n, model.drift * t)
    if model.sigma2 > 0:
        x += math.sqrt(model.sigma2 * t) * cfg_like_rngs[_CH_GAUSS].standard_normal(n)
    if isinstance(model.jumps, CompoundPoisson):
        counts = cfg_like_rngs[_CH_COUNT].poisson(model.jumps.rate * t, size=n)
        total = int(counts.sum())
        if total:
            sizes = model.jumps.law.sample(total, cfg_like_rngs[_CH_SIZE])
            csum = np.concatenate(([0.0], np.cumsum(sizes)))
            bounds = np.concatenate(([0], np.cumsum(counts)))
            x += csum[bounds[1:]] - csum[bounds[:-1]]
    elif isinstance(model.jumps, SymmetricStable):
        z = standard_symmetric_stable(model.jumps.index, n, cfg_like_rngs[_CH_STABLE])
        x += (t ** (1.0 / model.jumps.index)) * model.jumps.scale * z
    hits = (x >= a * t) & (x <= b * t)
    p = float(hits.mean())
    se = math.sqrt(max(p * (1 - p), 1e-300) / n)
    return p, se


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

_LAW_TAGS = {
    "two_point": TwoPointJumps,
    "gaussian": GaussianJumps,
    "exp_symmetric": SymmetricExponentialJumps,
}


def _check_fields(obj: dict, allowed: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ModelError(f"unknown fields {sorted(unknown)} in {where}")


def model_from_dict(spec: dict) -> LevyModel:
    """Parse {"sigma2":..,"drift":..,"jumps":{..}}; unknown fields are errors."""
    if not isinstance(spec, dict):
        raise ModelError("model spec must be a JSON object")
    _check_fields(spec, {"sigma2", "drift", "jumps"}, "model")
    jumps_spec = spec.get("jumps")
    jumps: Jumps = None
    if jumps_spec is not None:
        if not isinstance(jumps_spec, dict) or "type" not in jumps_spec:
            raise ModelError("jumps must be null or an object with a 'type'")
        kind = jumps_spec["type"]
        if kind == "compound_poisson":
            _check_fields(jumps_spec, {"type", "rate", "law"}, "jumps")
            law_spec = jumps_spec.get("law")
            if not isinstance(law_spec, dict) or law_spec.get("type") not in _LAW_TAGS:
                raise ModelError(
                    f"law must be an object with type in {sorted(_LAW_TAGS)}"
                )
            cls = _LAW_TAGS[law_spec["type"]]
            kwargs = {k: v for k, v in law_spec.items() if k != "type"}
            valid = set(cls.__dataclass_fields__)
            _check_fields(kwargs, valid, f"law '{law_spec['type']}'")
            law = cls(**kwargs)
            jumps = CompoundPoisson(rate=float(jumps_spec.get("rate", 0.0)), law=law)
        elif kind == "symmetric_stable":
            _check_fields(jumps_spec, {"type", "index", "scale"}, "jumps")
            jumps = SymmetricStable(
                index=float(jumps_spec["index"]),
                scale=float(jumps_spec.get("scale", 1.0)),
            )
        else:
            raise ModelError(f"unsupported jump type {kind!r}")
    return LevyModel(
        sigma2=float(spec.get("sigma2", 0.0)),
        drift=float(spec.get("drift", 0.0)),
        jumps=jumps,
    )


def model_to_dict(model: LevyModel) -> dict:
    jumps = None
    if isinstance(model.jumps, CompoundPoisson):
        law = model.jumps.law
        tag = next(k for k, v in _LAW_TAGS.items() if isinstance(law, v))
        law_spec = {"type": tag}
        law_spec.update({k: getattr(law, k) for k in law.__dataclass_fields__})
        jumps = {"type": "compound_poisson", "rate": model.jumps.rate, "law": law_spec}
    elif isinstance(model.jumps, SymmetricStable):
        jumps = {
            "type": "symmetric_stable",
            "index": model.jumps.index,
            "scale": model.jumps.scale,
        }
    return {"sigma2": model.sigma2, "drift": model.drift, "jumps": jumps}


def model_from_json(text: str) -> LevyModel:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model JSON does not parse: {exc}") from exc
    return model_from_dict(spec)


def brownian_model(beta: float, sigma2: float = 1.0) -> LevyModel:
    """Brownian motion with drift beta (unit variance by default)."""
    return LevyModel(sigma2=sigma2, drift=beta, jumps=None)
