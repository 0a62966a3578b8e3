"""Additive-noise model for noisy AHE schemes: predictor and simulator.

Models encryption as Enc(y) = y + e mod q with e ~ U(-B, B). An encrypted
inner product against a plaintext vector x then accumulates the noise term
e_s = sum(x_i * e_i), whose variance grows linearly with dimension and whose
worst case is |e_s| <= d * X * B for |x_i| <= X.

This is deliberately decoupled from the Paillier backend, which is exact;
the simulator exists to validate the growth formulas for schemes that do
carry noise. The uniform distribution U(-B, B) has variance B^2/3; a
``paper_form`` flag also exposes the looser closed form d * B^2 * E[x^2]
(i.e. Var taken as B^2) so both conventions can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError

# Trials are processed in fixed-size chunks with one child seed per chunk,
# so results for a given master seed do not depend on how chunks would be
# scheduled across workers.
_CHUNK_TRIALS = 4096


@dataclass(frozen=True)
class ConstantX:
    """Every query component equals ``value``."""

    value: float

    def mean_square(self) -> float:
        return self.value * self.value

    def max_abs(self) -> float:
        return abs(self.value)

    def sample(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        return np.full(shape, float(self.value))


@dataclass(frozen=True)
class UniformIntX:
    """Query components drawn uniformly from the integers [low, high]."""

    low: int
    high: int

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise ValidationError(f"empty integer range [{self.low}, {self.high}]")

    def mean_square(self) -> float:
        def cum(n: int) -> int:
            return n * (n + 1) * (2 * n + 1) // 6

        total = cum(self.high) - cum(self.low - 1)
        return total / (self.high - self.low + 1)

    def max_abs(self) -> float:
        return float(max(abs(self.low), abs(self.high)))

    def sample(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        return rng.integers(self.low, self.high + 1, size=shape).astype(np.float64)


XSampler = Union[ConstantX, UniformIntX]


@dataclass(frozen=True)
class NoiseParams:
    """Dimension, noise bound B, component bound X, and the x distribution."""

    dim: int
    noise_bound: float
    x_bound: float
    x_sampler: XSampler
    modulus_q: float | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")
        if not self.noise_bound > 0:
            raise ValidationError(f"noise bound must be positive, got {self.noise_bound}")
        if not self.x_bound > 0:
            raise ValidationError(f"x bound must be positive, got {self.x_bound}")


@dataclass(frozen=True)
class NoiseReport:
    """Predicted vs. empirical statistics for the accumulated noise term."""

    predicted_variance: float
    empirical_variance: float
    empirical_mean: float
    worst_case_bound: float
    max_observed_abs: float
    trials: int
    bound_violations: int
    decode_failures: int | None = None

    def to_json(self) -> dict:
        out = {
            "predicted_variance": self.predicted_variance,
            "empirical_variance": self.empirical_variance,
            "empirical_mean": self.empirical_mean,
            "worst_case_bound": self.worst_case_bound,
            "max_observed_abs": self.max_observed_abs,
            "trials": self.trials,
            "bound_violations": self.bound_violations,
        }
        if self.decode_failures is not None:
            out["decode_failures"] = self.decode_failures
        return out


def accumulate_noise(x: Sequence[float], e: Sequence[float]) -> float:
    """The accumulated noise term sum(x_i * e_i), correctly rounded."""
    if len(x) != len(e):
        raise ValidationError(
            f"length mismatch: x has {len(x)}, e has {len(e)}")
    return math.fsum(float(a) * float(b) for a, b in zip(x, e))


def predict_variance(params: NoiseParams, paper_form: bool = False) -> float:
    """Variance of the accumulated noise: d * Var(e) * E[x^2].

    Var(U(-B, B)) = B^2/3 exactly; with ``paper_form`` the noise variance is
    taken as B^2 instead, reproducing the 3x-larger closed form.
    """
    var_e = params.noise_bound ** 2
    if not paper_form:
        var_e /= 3.0
    return params.dim * var_e * params.x_sampler.mean_square()


def worst_case_bound(dim: int, x_bound: float, noise_bound: float) -> float:
    """Worst-case |sum(x_i * e_i)| for |x_i| <= X and |e_i| <= B: d * X * B."""
    if dim < 0:
        raise ValidationError(f"dimension must be >= 0, got {dim}")
    return dim * x_bound * noise_bound


def simulate(params: NoiseParams, trials: int, seed: int | None = None) -> NoiseReport:
    """Monte-Carlo run of the accumulated noise term; deterministic per seed."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    bound = worst_case_bound(params.dim, params.x_bound, params.noise_bound)
    half_q = params.modulus_q / 2 if params.modulus_q is not None else None

    n_chunks = (trials + _CHUNK_TRIALS - 1) // _CHUNK_TRIALS
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    total = 0.0
    total_sq = 0.0
    max_abs = 0.0
    violations = 0
    failures = 0
    remaining = trials
    for child in children:
        m = min(_CHUNK_TRIALS, remaining)
        remaining -= m
        rng = np.random.default_rng(child)
        e = rng.uniform(-params.noise_bound, params.noise_bound, (m, params.dim))
        x = params.x_sampler.sample(rng, (m, params.dim))
        s = (x * e).sum(axis=1)
        abs_s = np.abs(s)
        total += float(s.sum())
        total_sq += float((s * s).sum())
        max_abs = max(max_abs, float(abs_s.max()))
        violations += int((abs_s > bound).sum())
        if half_q is not None:
            failures += int((abs_s >= half_q).sum())

    mean = total / trials
    variance = total_sq / trials - mean * mean
    return NoiseReport(
        predicted_variance=predict_variance(params),
        empirical_variance=variance,
        empirical_mean=mean,
        worst_case_bound=bound,
        max_observed_abs=max_abs,
        trials=trials,
        bound_violations=violations,
        decode_failures=failures if half_q is not None else None,
    )


def sweep_dims(params: NoiseParams, dims: Sequence[int], trials: int,
               seed: int | None = None) -> list[tuple[int, NoiseReport]]:
    """Run simulate at each dimension with a per-dimension derived seed."""
    rows = []
    for d in dims:
        sub_seed = int(np.random.SeedSequence([0 if seed is None else seed,
                                               d]).generate_state(1)[0])
        rows.append((d, simulate(replace(params, dim=d), trials, sub_seed)))
    return rows


def linearity_fit(rows: Sequence[tuple[int, NoiseReport]]) -> tuple[float, float]:
    """Least-squares slope and intercept of empirical variance against dim."""
    dims = np.array([d for d, _ in rows], dtype=np.float64)
    variances = np.array([r.empirical_variance for _, r in rows], dtype=np.float64)
    slope, intercept = np.polyfit(dims, variances, 1)
    return float(slope), float(intercept)
