"""Paillier cryptosystem: additively homomorphic encryption over Z_{N^2}*.

Self-contained big-integer implementation (gmpy2 is used for modular
exponentiation when available, with a pure-Python fallback). Probable primes
come from Miller-Rabin with 64 rounds. Designed for correctness and
reasonable performance at desk scale; there is no constant-time hardening,
so do not use it where side channels matter.

Keys and ciphertexts are immutable; every operation is a pure function of
its inputs plus an explicit randomness source, so concurrent use is safe as
long as each caller supplies its own ``random.Random``.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import random
from dataclasses import dataclass
from functools import cached_property

from .errors import CorruptCiphertextError, KeyMismatchError, ValidationError

try:
    from gmpy2 import powmod as _gmpy_powmod

    def _powmod(base: int, exp: int, mod: int) -> int:
        return int(_gmpy_powmod(base, exp, mod))

except ImportError:  # pragma: no cover - exercised only without gmpy2
    _powmod = pow

# Residues in [0, N); plain ints are the natural representation in Python.
PlainResidue = int

MIN_KEY_BITS = 64
MILLER_RABIN_ROUNDS = 64
FINGERPRINT_BYTES = 16

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
                 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
                 173, 179, 181, 191, 193, 197, 199]

_sysrand = random.SystemRandom()


def int_to_bytes(x: int) -> bytes:
    """Minimal big-endian byte string for a nonnegative integer."""
    if x < 0:
        raise ValidationError("cannot serialize negative integer")
    return x.to_bytes(max(1, (x.bit_length() + 7) // 8), "big")


def int_from_bytes(b: bytes) -> int:
    return int.from_bytes(b, "big")


def b64_int(x: int) -> str:
    return base64.b64encode(int_to_bytes(x)).decode("ascii")


def int_from_b64(s: str) -> int:
    return int_from_bytes(base64.b64decode(s.encode("ascii")))


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS,
                      rng: random.Random | None = None) -> bool:
    """Miller-Rabin primality test with random bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    rng = rng or _sysrand
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = _powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime(bits: int, rng: random.Random) -> int:
    # Top two bits forced so the product of two such primes has exactly
    # 2*bits bits.
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | (1 << (bits - 2)) | 1
        if is_probable_prime(candidate, rng=rng):
            return candidate


@dataclass(frozen=True)
class PublicKey:
    """Paillier public key; the generator is fixed to N+1."""

    modulus: int
    modulus_squared: int
    generator: int
    fingerprint: bytes

    @classmethod
    def from_modulus(cls, n: int) -> "PublicKey":
        g = n + 1
        return cls(modulus=n, modulus_squared=n * n, generator=g,
                   fingerprint=_fingerprint(n, g))

    def to_json(self) -> dict:
        return {"n": b64_int(self.modulus), "g": b64_int(self.generator)}

    @classmethod
    def from_json(cls, obj: dict) -> "PublicKey":
        n = int_from_b64(obj["n"])
        g = int_from_b64(obj["g"])
        if g != n + 1:
            raise ValidationError("public key generator must equal N+1")
        return cls.from_modulus(n)


def _canonical_public_bytes(n: int, g: int) -> bytes:
    payload = {"n": b64_int(n), "g": b64_int(g)}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("ascii")


def _fingerprint(n: int, g: int) -> bytes:
    return hashlib.sha256(_canonical_public_bytes(n, g)).digest()[:FINGERPRINT_BYTES]


@dataclass(frozen=True)
class SecretKey:
    """Secret key material; decryption runs over CRT components of N."""

    p: int
    q: int
    lam: int
    mu: int
    public: PublicKey

    @classmethod
    def from_primes(cls, p: int, q: int) -> "SecretKey":
        if p == q:
            raise ValidationError("p and q must be distinct primes")
        n = p * q
        public = PublicKey.from_modulus(n)
        lam = math.lcm(p - 1, q - 1)
        # g = N+1 makes L(g^lam mod N^2) = lam mod N.
        mu = pow(lam % n, -1, n)
        return cls(p=p, q=q, lam=lam, mu=mu, public=public)

    def to_json(self) -> dict:
        return {"p": b64_int(self.p), "q": b64_int(self.q)}

    @classmethod
    def from_json(cls, obj: dict) -> "SecretKey":
        return cls.from_primes(int_from_b64(obj["p"]), int_from_b64(obj["q"]))

    # CRT constants are derived lazily and cached; the dataclass stays frozen.
    @cached_property
    def _p_squared(self) -> int:
        return self.p * self.p

    @cached_property
    def _q_squared(self) -> int:
        return self.q * self.q

    @cached_property
    def _hp(self) -> int:
        return pow(_l_func(_powmod(self.public.generator, self.p - 1,
                                   self._p_squared), self.p), -1, self.p)

    @cached_property
    def _hq(self) -> int:
        return pow(_l_func(_powmod(self.public.generator, self.q - 1,
                                   self._q_squared), self.q), -1, self.q)

    @cached_property
    def _q_inv_p(self) -> int:
        return pow(self.q, -1, self.p)


@dataclass(frozen=True)
class Ciphertext:
    """One element of Z_{N^2}*, tagged with the producing key's fingerprint."""

    value: int
    key_fingerprint: bytes

    def to_json(self) -> dict:
        return {"v": b64_int(self.value),
                "kfp": base64.b64encode(self.key_fingerprint).decode("ascii")}

    @classmethod
    def from_json(cls, obj: dict) -> "Ciphertext":
        return cls(value=int_from_b64(obj["v"]),
                   key_fingerprint=kfp_check(base64.b64decode(obj["kfp"])))


def kfp_check(fp: bytes) -> bytes:
    if len(fp) != FINGERPRINT_BYTES:
        raise ValidationError(f"key fingerprint must be {FINGERPRINT_BYTES} bytes")
    return fp


def _l_func(u: int, n: int) -> int:
    return (u - 1) // n


def keygen(bits: int, rng: random.Random | None = None) -> tuple[PublicKey, SecretKey]:
    """Generate a key pair whose modulus N has exactly ``bits`` bits.

    ``bits`` must be even and at least 64. 64-bit keys are for tests only;
    use 2048 bits or more for anything real. Pass a seeded ``rng`` only in
    tests that need reproducible keys.
    """
    if bits < MIN_KEY_BITS:
        raise ValidationError(f"key size must be at least {MIN_KEY_BITS} bits, got {bits}")
    if bits % 2 != 0:
        raise ValidationError(f"key size must be even, got {bits}")
    rng = rng or _sysrand
    half = bits // 2
    p = _random_prime(half, rng)
    q = _random_prime(half, rng)
    while q == p:
        q = _random_prime(half, rng)
    sk = SecretKey.from_primes(p, q)
    assert sk.public.modulus.bit_length() == bits
    return sk.public, sk


def _sample_unit(n: int, rng: random.Random) -> int:
    # Uniform residue in [1, N) coprime to N; retries are vanishingly rare
    # for honestly generated keys.
    while True:
        r = rng.randrange(1, n)
        if math.gcd(r, n) == 1:
            return r


def encrypt(pk: PublicKey, m: PlainResidue, rng: random.Random | None = None) -> Ciphertext:
    """Randomized encryption of a residue in [0, N): (1 + mN) * r^N mod N^2."""
    if not 0 <= m < pk.modulus:
        raise ValidationError(f"plaintext must lie in [0, N), got {m}")
    rng = rng or _sysrand
    n, n2 = pk.modulus, pk.modulus_squared
    r = _sample_unit(n, rng)
    value = ((1 + m * n) * _powmod(r, n, n2)) % n2
    return Ciphertext(value=value, key_fingerprint=pk.fingerprint)


def _check_ciphertext(sk_or_pk_fp: bytes, c: Ciphertext, n: int, n2: int) -> None:
    if c.key_fingerprint != sk_or_pk_fp:
        raise KeyMismatchError("ciphertext was produced under a different key")
    if not 1 <= c.value < n2 or math.gcd(c.value, n) != 1:
        raise CorruptCiphertextError("ciphertext value is not a unit modulo N^2")


def decrypt(sk: SecretKey, c: Ciphertext) -> PlainResidue:
    """Exact decryption via CRT over p and q."""
    pk = sk.public
    _check_ciphertext(pk.fingerprint, c, pk.modulus, pk.modulus_squared)
    mp = (_l_func(_powmod(c.value, sk.p - 1, sk._p_squared), sk.p) * sk._hp) % sk.p
    mq = (_l_func(_powmod(c.value, sk.q - 1, sk._q_squared), sk.q) * sk._hq) % sk.q
    u = ((mp - mq) * sk._q_inv_p) % sk.p
    return (mq + u * sk.q) % pk.modulus


def _decrypt_noncrt(sk: SecretKey, c: Ciphertext) -> PlainResidue:
    # Reference path: L(c^lam mod N^2) * mu mod N. Used by tests to confirm
    # the CRT path is bit-identical.
    pk = sk.public
    _check_ciphertext(pk.fingerprint, c, pk.modulus, pk.modulus_squared)
    u = _powmod(c.value, sk.lam, pk.modulus_squared)
    return (_l_func(u, pk.modulus) * sk.mu) % pk.modulus


def ct_add(pk: PublicKey, a: Ciphertext, b: Ciphertext) -> Ciphertext:
    """Homomorphic addition: the ciphertext group operation is multiplication."""
    if a.key_fingerprint != pk.fingerprint or b.key_fingerprint != pk.fingerprint:
        raise KeyMismatchError("ct_add operands must be under the given public key")
    return Ciphertext(value=(a.value * b.value) % pk.modulus_squared,
                      key_fingerprint=pk.fingerprint)


def scalar_mul(pk: PublicKey, c: Ciphertext, k: int) -> Ciphertext:
    """Multiply the plaintext by k via square-and-multiply exponentiation.

    Negative k is reduced mod N first, which realizes subtraction under the
    signed encoding.
    """
    if c.key_fingerprint != pk.fingerprint:
        raise KeyMismatchError("ciphertext was produced under a different key")
    value = _powmod(c.value, k % pk.modulus, pk.modulus_squared)
    return Ciphertext(value=value, key_fingerprint=pk.fingerprint)


def scalar_mul_naive(pk: PublicKey, c: Ciphertext, k: int,
                     rng: random.Random | None = None) -> Ciphertext:
    """Multiply the plaintext by k >= 0 by literal repeated addition.

    k-1 ciphertext additions; k = 0 returns a fresh encryption of zero.
    Baseline for benchmarks and cross-checking scalar_mul; cost O(k).
    """
    if k < 0:
        raise ValidationError(f"repeated addition requires k >= 0, got {k}")
    if k == 0:
        return encrypt(pk, 0, rng)
    acc = c
    for _ in range(k - 1):
        acc = ct_add(pk, acc, c)
    return acc


def rerandomize(pk: PublicKey, c: Ciphertext, rng: random.Random | None = None) -> Ciphertext:
    """Fresh ciphertext with the same plaintext and independent randomness."""
    if c.key_fingerprint != pk.fingerprint:
        raise KeyMismatchError("ciphertext was produced under a different key")
    rng = rng or _sysrand
    n, n2 = pk.modulus, pk.modulus_squared
    r = _sample_unit(n, rng)
    return Ciphertext(value=(c.value * _powmod(r, n, n2)) % n2,
                      key_fingerprint=pk.fingerprint)
