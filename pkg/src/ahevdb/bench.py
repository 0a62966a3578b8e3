"""Benchmark harness for the encrypted inner product.

The interesting claim is asymptotic: evaluation time is linear in the
dimension at a fixed key size, and square-and-multiply scalar
multiplication beats literal repeated addition by orders of magnitude for
large scalars. Every measured result is decrypted and checked against a
plaintext recomputation before its timing is accepted. Timings are
median-of-reps with one discarded warm-up run, measured sequentially.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import paillier
from .encoding import EncodingParams, decode_score
from .errors import ValidationError
from .similarity import PlainVector, encrypt_vector, inner_product

# f = 0 integer workload; component magnitudes are fixed so the per-slot
# exponent size stays constant across dimensions.
_COMPONENT_RANGE = 1000


@dataclass(frozen=True)
class ScalingPoint:
    dim: int
    seconds: float


@dataclass(frozen=True)
class BenchReport:
    """Wall times per dimension plus a linear fit and per-op estimates."""

    key_bits: int
    reps: int
    points: tuple[ScalingPoint, ...]
    t_pcm: float
    t_add: float
    t_dec: float
    slope: float
    intercept: float
    r_squared: float

    def to_json(self) -> dict:
        return {
            "key_bits": self.key_bits,
            "reps": self.reps,
            "dims": [p.dim for p in self.points],
            "seconds": [p.seconds for p in self.points],
            "t_pcm": self.t_pcm,
            "t_add": self.t_add,
            "t_dec": self.t_dec,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


@dataclass(frozen=True)
class ScalarPoint:
    exponent: int
    fast_seconds: float
    naive_seconds: float
    speedup: float


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares line through (xs, ys) and its R^2."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = ys - (slope * xs + intercept)
    ss_res = float((residuals ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def _median_time(fn, reps: int) -> float:
    fn()  # warm-up, discarded
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def _parse_dims(dims) -> list[int]:
    dims = list(dims)
    if len(dims) < 2:
        raise ValidationError("need at least two dimensions to fit a line")
    if any(d < 1 for d in dims):
        raise ValidationError("dimensions must be positive")
    if sorted(dims) != dims or len(set(dims)) != len(dims):
        raise ValidationError("dimensions must be strictly increasing")
    return dims


def run_scaling_bench(bits: int, dims, reps: int = 5,
                      seed: int | None = None) -> BenchReport:
    """Measure inner_product wall time per dimension at a fixed key size."""
    dims = _parse_dims(dims)
    if reps < 1:
        raise ValidationError("reps must be >= 1")
    rng = random.Random(seed) if seed is not None else random.Random()
    pk, sk = paillier.keygen(bits)
    params = EncodingParams(frac_bits=0, max_abs=float(_COMPONENT_RANGE),
                            modulus=pk.modulus)

    points = []
    for d in dims:
        xs = [rng.randint(-_COMPONENT_RANGE, _COMPONENT_RANGE) for _ in range(d)]
        ys = [rng.randint(-_COMPONENT_RANGE, _COMPONENT_RANGE) for _ in range(d)]
        x = PlainVector.from_values(params, xs)
        y = encrypt_vector(pk, params, ys, label=f"bench-{d}", rng=rng)
        expected = sum(a * b for a, b in zip(xs, ys))

        def evaluate():
            return inner_product(pk, x, y, rng)

        got = decode_score(params, paillier.decrypt(sk, evaluate()), d)
        if got != expected:
            raise AssertionError(
                f"refusing to time a wrong answer at dim {d}: "
                f"{got} != {expected}")
        points.append(ScalingPoint(dim=d, seconds=_median_time(evaluate, reps)))

    # Per-op estimates at a representative operand size.
    m = rng.randrange(pk.modulus)
    ct = paillier.encrypt(pk, m, rng)
    k = _COMPONENT_RANGE
    t_pcm = _median_time(lambda: paillier.scalar_mul(pk, ct, k), max(reps, 20))
    other = paillier.encrypt(pk, 1, rng)
    t_add = _median_time(lambda: paillier.ct_add(pk, ct, other), max(reps, 20))
    t_dec = _median_time(lambda: paillier.decrypt(sk, ct), max(reps, 20))

    slope, intercept, r_squared = linear_fit(
        [p.dim for p in points], [p.seconds for p in points])
    return BenchReport(key_bits=bits, reps=reps, points=tuple(points),
                       t_pcm=t_pcm, t_add=t_add, t_dec=t_dec,
                       slope=slope, intercept=intercept, r_squared=r_squared)


def run_scalar_bench(bits: int, exponents, reps: int = 3,
                     seed: int | None = None) -> list[ScalarPoint]:
    """Time scalar_mul against scalar_mul_naive per exponent.

    Decrypted outputs are asserted equal (and equal to k*m mod N) before
    any timing is recorded.
    """
    exponents = list(exponents)
    if not exponents:
        raise ValidationError("need at least one exponent")
    if any(k < 0 for k in exponents):
        raise ValidationError("exponents must be nonnegative")
    if reps < 1:
        raise ValidationError("reps must be >= 1")
    rng = random.Random(seed) if seed is not None else random.Random()
    pk, sk = paillier.keygen(bits)
    m = rng.randrange(pk.modulus)
    ct = paillier.encrypt(pk, m, rng)

    points = []
    for k in exponents:
        fast = paillier.scalar_mul(pk, ct, k)
        slow = paillier.scalar_mul_naive(pk, ct, k, rng)
        expected = (k * m) % pk.modulus
        if not (paillier.decrypt(sk, fast) == paillier.decrypt(sk, slow) == expected):
            raise AssertionError(f"scalar paths disagree at exponent {k}")
        fast_s = _median_time(lambda: paillier.scalar_mul(pk, ct, k), reps)
        naive_s = _median_time(lambda: paillier.scalar_mul_naive(pk, ct, k, rng), reps)
        points.append(ScalarPoint(exponent=k, fast_seconds=fast_s,
                                  naive_seconds=naive_s,
                                  speedup=naive_s / fast_s))
    return points
