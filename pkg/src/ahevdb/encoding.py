"""Signed fixed-point encoding between real vectors and modular residues.

A real v is stored as round(v * 2^f) mod N, with negative values wrapped
into the upper residue range. An inner product of two encoded vectors
carries scale 2^(2f); it decodes exactly as long as the overflow budget
d * (X * 2^f)^2 < N/2 holds, which keeps the accumulated score away from
the modular wrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .paillier import PlainResidue

DEFAULT_FRAC_BITS = 16


@dataclass(frozen=True)
class EncodingParams:
    """Fixed-point scale 2^frac_bits and component magnitude bound max_abs."""

    frac_bits: int
    max_abs: float
    modulus: int

    def __post_init__(self) -> None:
        if self.frac_bits < 0:
            raise ValidationError(f"frac_bits must be >= 0, got {self.frac_bits}")
        if not self.max_abs > 0:
            raise ValidationError(f"max_abs must be positive, got {self.max_abs}")
        if Fraction(self.max_abs) * self.scale >= Fraction(self.modulus, 2):
            raise ValidationError("max_abs * 2^frac_bits must stay below N/2")

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def max_scaled(self) -> int:
        """Largest scaled-component magnitude reachable from |v| <= max_abs."""
        bound = Fraction(self.max_abs) * self.scale + Fraction(1, 2)
        return bound.numerator // bound.denominator

    def to_json(self) -> dict:
        return {"f": self.frac_bits, "x_max": self.max_abs}

    @classmethod
    def from_json(cls, obj: dict, modulus: int) -> "EncodingParams":
        return cls(frac_bits=int(obj["f"]), max_abs=float(obj["x_max"]),
                   modulus=modulus)


@dataclass(frozen=True)
class BudgetReport:
    """Whether dimension ``dim`` fits the overflow budget, and by how much."""

    dim: int
    ok: bool
    headroom: float
    max_safe_dim: int


def scale_value(params: EncodingParams, v: float) -> int:
    """Round v * 2^f to the nearest integer (ties to even)."""
    if abs(v) > params.max_abs:
        raise ValidationError(
            f"|{v}| exceeds the magnitude bound {params.max_abs}")
    return round(v * params.scale)


def encode_signed(params: EncodingParams, v: float) -> PlainResidue:
    """Residue of the scaled value; negatives wrap into [N/2, N)."""
    return scale_value(params, v) % params.modulus


def signed_residue(params: EncodingParams, r: PlainResidue) -> int:
    """Map a residue back to the signed scaled integer it encodes."""
    n = params.modulus
    if not 0 <= r < n:
        raise ValidationError(f"residue must lie in [0, N), got {r}")
    return r if 2 * r < n else r - n


def decode_signed(params: EncodingParams, r: PlainResidue) -> float:
    """Inverse of encode_signed on the representable grid."""
    return signed_residue(params, r) / params.scale


def decode_score(params: EncodingParams, r: PlainResidue,
                 dim: int | None = None) -> float:
    """Decode an inner-product residue, which carries scale 2^(2f).

    When ``dim`` is given the overflow budget is checked first; exact for
    in-budget scores of grid-representable inputs (the single final division
    is the only floating-point step).
    """
    if dim is not None:
        report = overflow_budget(params, dim)
        if not report.ok:
            raise ValidationError(
                f"overflow budget violated at dim {dim}; "
                f"max safe dim is {report.max_safe_dim}")
    return signed_residue(params, r) / (params.scale * params.scale)


def overflow_budget(params: EncodingParams, dim: int) -> BudgetReport:
    """Check d * (X * 2^f)^2 < N/2, the exact-decode capacity condition."""
    if dim < 0:
        raise ValidationError(f"dimension must be >= 0, got {dim}")
    bound_sq = (Fraction(params.max_abs) * params.scale) ** 2
    limit = Fraction(params.modulus, 2)
    ok = dim * bound_sq < limit
    ratio = limit / bound_sq
    max_safe_dim = (ratio.numerator - 1) // ratio.denominator
    if dim == 0:
        headroom = math.inf
    else:
        try:
            headroom = float(limit / (dim * bound_sq))
        except OverflowError:
            headroom = math.inf
    return BudgetReport(dim=dim, ok=ok, headroom=headroom,
                        max_safe_dim=max_safe_dim)
