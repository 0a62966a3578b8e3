"""Encrypted inner-product similarity and decrypt-then-rank top-k.

The evaluator side (encrypt_vector, inner_product, batch_similarity) works
with the public key only; ranking (topk) is the key holder's step. Scores
returned by the evaluator are rerandomized so they carry no algebraic link
to the input ciphertexts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import paillier
from .encoding import EncodingParams, decode_score, overflow_budget, scale_value
from .errors import KeyMismatchError, ValidationError
from .paillier import Ciphertext, PublicKey, SecretKey


@dataclass(frozen=True)
class PlainVector:
    """Signed scaled integer components plus the encoding they live in."""

    components: tuple[int, ...]
    params: EncodingParams

    def __post_init__(self) -> None:
        bound = self.params.max_scaled
        for i, c in enumerate(self.components):
            if abs(c) > bound:
                raise ValidationError(
                    f"scaled component {i} = {c} exceeds the bound {bound}")

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def from_values(cls, params: EncodingParams,
                    values: Sequence[float]) -> "PlainVector":
        components = []
        for i, v in enumerate(values):
            if abs(v) > params.max_abs:
                raise ValidationError(
                    f"component {i}: |{v}| exceeds the magnitude bound "
                    f"{params.max_abs}")
            components.append(scale_value(params, v))
        return cls(components=tuple(components), params=params)


@dataclass(frozen=True)
class EncVector:
    """A vector encrypted componentwise under one key."""

    cts: tuple[Ciphertext, ...]
    params: EncodingParams
    key_fingerprint: bytes
    label: str = ""

    def __post_init__(self) -> None:
        for ct in self.cts:
            if ct.key_fingerprint != self.key_fingerprint:
                raise ValidationError(
                    "all ciphertexts of a vector must share one key fingerprint")

    @property
    def dim(self) -> int:
        return len(self.cts)


@dataclass(frozen=True)
class ScoredMatch:
    label: str
    score: float
    rank: int


def encrypt_vector(pk: PublicKey, params: EncodingParams,
                   values: Sequence[float], label: str = "",
                   rng: random.Random | None = None) -> EncVector:
    """Encode and encrypt componentwise with fresh randomness per slot."""
    if params.modulus != pk.modulus:
        raise ValidationError("encoding params bound to a different modulus")
    cts = []
    for i, v in enumerate(values):
        if abs(v) > params.max_abs:
            raise ValidationError(
                f"component {i} of {label!r}: |{v}| exceeds the magnitude "
                f"bound {params.max_abs}")
        residue = scale_value(params, v) % params.modulus
        cts.append(paillier.encrypt(pk, residue, rng))
    return EncVector(cts=tuple(cts), params=params,
                     key_fingerprint=pk.fingerprint, label=label)


def _check_pair(pk: PublicKey, x: PlainVector, y: EncVector) -> None:
    if y.key_fingerprint != pk.fingerprint:
        raise KeyMismatchError(f"vector {y.label!r} is not under the given key")
    if x.dim != y.dim:
        raise ValidationError(
            f"dimension mismatch: query has {x.dim}, {y.label!r} has {y.dim}")
    if x.params != y.params:
        raise ValidationError(
            f"encoding params mismatch between query and {y.label!r}")
    report = overflow_budget(x.params, x.dim)
    if not report.ok:
        raise ValidationError(
            f"overflow budget violated at dim {x.dim}; "
            f"max safe dim is {report.max_safe_dim}")


def inner_product(pk: PublicKey, x: PlainVector, y: EncVector,
                  rng: random.Random | None = None) -> Ciphertext:
    """Encrypted dot product: multiply each slot by its plaintext scalar,
    fold with homomorphic addition, rerandomize the result."""
    _check_pair(pk, x, y)
    if x.dim == 0:
        return paillier.encrypt(pk, 0, rng)
    acc = paillier.scalar_mul(pk, y.cts[0], x.components[0])
    for k, ct in zip(x.components[1:], y.cts[1:]):
        acc = paillier.ct_add(pk, acc, paillier.scalar_mul(pk, ct, k))
    return paillier.rerandomize(pk, acc, rng)


def inner_product_naive(pk: PublicKey, x: PlainVector, y: EncVector,
                        rng: random.Random | None = None) -> Ciphertext:
    """Same result as inner_product but each scalar multiple is computed by
    literal repeated addition; nonnegative components only. Oracle and
    benchmark baseline."""
    for i, k in enumerate(x.components):
        if k < 0:
            raise ValidationError(
                f"repeated addition requires nonnegative components; "
                f"component {i} is {k}")
    _check_pair(pk, x, y)
    if x.dim == 0:
        return paillier.encrypt(pk, 0, rng)
    acc = paillier.scalar_mul_naive(pk, y.cts[0], x.components[0], rng)
    for k, ct in zip(x.components[1:], y.cts[1:]):
        acc = paillier.ct_add(pk, acc, paillier.scalar_mul_naive(pk, ct, k, rng))
    return paillier.rerandomize(pk, acc, rng)


def batch_similarity(pk: PublicKey, x: PlainVector,
                     db: Iterable[EncVector],
                     rng: random.Random | None = None
                     ) -> list[tuple[str, Ciphertext]]:
    """Order-preserving map of inner_product over a database of vectors."""
    return [(y.label, inner_product(pk, x, y, rng)) for y in db]


def topk(sk: SecretKey, params: EncodingParams,
         scores: Iterable[tuple[str, Ciphertext]], k: int) -> list[ScoredMatch]:
    """Decrypt and rank scores descending; ties break by ascending label."""
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    decoded = [(label, decode_score(params, paillier.decrypt(sk, ct)))
               for label, ct in scores]
    decoded.sort(key=lambda item: (-item[1], item[0]))
    return [ScoredMatch(label=label, score=score, rank=i + 1)
            for i, (label, score) in enumerate(decoded[:k])]
