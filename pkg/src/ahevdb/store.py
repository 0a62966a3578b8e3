"""Persistence for keys and encrypted vector databases.

Database container layout, bit-exact:

    8 bytes   magic "AHEVDB01"
    1 line    canonical JSON header, "\\n"-terminated
    records   4-byte little-endian payload length, then the payload

Each record payload is a 2-byte little-endian label length, the UTF-8
label, then per slot a 4-byte little-endian length and the ciphertext
value as minimal big-endian bytes. Integers are encoded minimally so
save -> load -> save reproduces files byte for byte. Writes go through a
temp file plus rename for crash consistency; concurrent readers are safe,
writers are not coordinated.
"""

from __future__ import annotations

import base64
import json
import os
import struct
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Sequence

from .encoding import EncodingParams
from .errors import (
    IntegrityError,
    KeyMismatchError,
    StoreCorruptError,
    StoreFormatError,
    ValidationError,
)
from .paillier import (
    Ciphertext,
    PublicKey,
    SecretKey,
    b64_int,
    int_from_b64,
    int_from_bytes,
    int_to_bytes,
    is_probable_prime,
)
from .similarity import EncVector

MAGIC = b"AHEVDB01"
MAX_LABEL_BYTES = 256


@dataclass(frozen=True)
class StoreHeader:
    key_fingerprint: bytes
    dim: int
    count: int
    params: EncodingParams
    created_at: str
    magic: bytes = MAGIC


@dataclass(frozen=True)
class StoreRecord:
    label: str
    cts: tuple[Ciphertext, ...]


def make_header(pk: PublicKey, params: EncodingParams, dim: int,
                count: int, created_at: str | None = None) -> StoreHeader:
    if created_at is None:
        created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return StoreHeader(key_fingerprint=pk.fingerprint, dim=dim, count=count,
                       params=params, created_at=created_at)


def record_to_enc_vector(header: StoreHeader, record: StoreRecord) -> EncVector:
    return EncVector(cts=record.cts, params=header.params,
                     key_fingerprint=header.key_fingerprint,
                     label=record.label)


def _header_json(header: StoreHeader) -> bytes:
    payload = {
        "kfp": base64.b64encode(header.key_fingerprint).decode("ascii"),
        "n": b64_int(header.params.modulus),
        "dim": header.dim,
        "count": header.count,
        "params": header.params.to_json(),
        "created_at": header.created_at,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("ascii")


def _parse_header(line: bytes) -> StoreHeader:
    try:
        obj = json.loads(line)
        params = EncodingParams.from_json(obj["params"], int_from_b64(obj["n"]))
        header = StoreHeader(
            key_fingerprint=base64.b64decode(obj["kfp"]),
            dim=int(obj["dim"]),
            count=int(obj["count"]),
            params=params,
            created_at=str(obj["created_at"]),
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise StoreFormatError(f"bad database header: {exc}") from exc
    if header.dim < 0 or header.count < 0:
        raise StoreFormatError("header dim and count must be nonnegative")
    return header


def _record_payload(record: StoreRecord) -> bytes:
    label_bytes = record.label.encode("utf-8")
    if len(label_bytes) > MAX_LABEL_BYTES:
        raise ValidationError(
            f"label {record.label!r} exceeds {MAX_LABEL_BYTES} UTF-8 bytes")
    parts = [struct.pack("<H", len(label_bytes)), label_bytes]
    for ct in record.cts:
        value_bytes = int_to_bytes(ct.value)
        parts.append(struct.pack("<I", len(value_bytes)))
        parts.append(value_bytes)
    return b"".join(parts)


def _read_exact(fh: BinaryIO, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise StoreCorruptError(f"truncated file while reading {what}")
    return data


def _parse_record(payload: bytes, header: StoreHeader) -> StoreRecord:
    view = memoryview(payload)
    pos = 0

    def take(n: int, what: str) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise StoreCorruptError(f"record payload truncated in {what}")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    (label_len,) = struct.unpack("<H", take(2, "label length"))
    if label_len > MAX_LABEL_BYTES:
        raise StoreCorruptError(f"label length {label_len} exceeds {MAX_LABEL_BYTES}")
    try:
        label = bytes(take(label_len, "label")).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise StoreCorruptError("label is not valid UTF-8") from exc
    n2 = header.params.modulus * header.params.modulus
    cts = []
    for _ in range(header.dim):
        (ct_len,) = struct.unpack("<I", take(4, "ciphertext length"))
        value = int_from_bytes(bytes(take(ct_len, "ciphertext")))
        if not 1 <= value < n2:
            raise StoreCorruptError("ciphertext value outside [1, N^2)")
        cts.append(Ciphertext(value=value, key_fingerprint=header.key_fingerprint))
    if pos != len(view):
        raise StoreCorruptError("record payload has trailing bytes")
    return StoreRecord(label=label, cts=tuple(cts))


def _atomic_write(path: str | Path, data: bytes, mode: int | None = None) -> None:
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."),
                                    prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        if mode is not None:
            os.chmod(tmp_name, mode)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def save_db(path: str | Path, header: StoreHeader,
            records: Sequence[StoreRecord]) -> None:
    """Write the container atomically after validating record consistency."""
    if header.magic != MAGIC:
        raise ValidationError(f"header magic must be {MAGIC!r}")
    if header.count != len(records):
        raise ValidationError(
            f"header count {header.count} != {len(records)} records")
    seen = set()
    for record in records:
        if record.label in seen:
            raise ValidationError(f"duplicate label {record.label!r}")
        seen.add(record.label)
        if len(record.cts) != header.dim:
            raise ValidationError(
                f"record {record.label!r} has {len(record.cts)} slots, "
                f"header says {header.dim}")
        for ct in record.cts:
            if ct.key_fingerprint != header.key_fingerprint:
                raise ValidationError(
                    f"record {record.label!r} was encrypted under a "
                    f"different key than the header claims")
    blob = [MAGIC, _header_json(header), b"\n"]
    for record in records:
        payload = _record_payload(record)
        blob.append(struct.pack("<I", len(payload)))
        blob.append(payload)
    _atomic_write(path, b"".join(blob))


def load_db(path: str | Path,
            pk: PublicKey | None = None) -> tuple[StoreHeader, list[StoreRecord]]:
    """Read and validate a container; pass ``pk`` to also verify key identity."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise StoreFormatError(
                f"bad magic {magic!r}; not a vector database file")
        header_line = bytearray()
        while True:
            b = fh.read(1)
            if not b:
                raise StoreCorruptError("truncated file while reading header")
            if b == b"\n":
                break
            header_line += b
        header = _parse_header(bytes(header_line))
        records = []
        for i in range(header.count):
            (length,) = struct.unpack(
                "<I", _read_exact(fh, 4, f"record {i} length"))
            payload = _read_exact(fh, length, f"record {i}")
            records.append(_parse_record(payload, header))
        if fh.read(1):
            raise StoreCorruptError("trailing data after the last record")
    if pk is not None and header.key_fingerprint != pk.fingerprint:
        raise KeyMismatchError(
            "database was encrypted under a different public key")
    return header, records


def save_keys(path_pub: str | Path, path_sec: str | Path,
              pk: PublicKey, sk: SecretKey) -> None:
    """Write key envelopes; the secret file is owner-readable only."""
    pub_blob = json.dumps(pk.to_json(), sort_keys=True,
                          separators=(",", ":")).encode("ascii") + b"\n"
    sec_blob = json.dumps(sk.to_json(), sort_keys=True,
                          separators=(",", ":")).encode("ascii") + b"\n"
    _atomic_write(path_pub, pub_blob)
    _atomic_write(path_sec, sec_blob, mode=0o600)


def load_public_key(path: str | Path) -> PublicKey:
    try:
        with open(path, "r", encoding="ascii") as fh:
            obj = json.load(fh)
        return PublicKey.from_json(obj)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StoreFormatError(f"bad public key file: {exc}") from exc


def load_keys(path_pub: str | Path,
              path_sec: str | Path) -> tuple[PublicKey, SecretKey]:
    """Load both keys and sanity-check that they belong together."""
    pk = load_public_key(path_pub)
    try:
        with open(path_sec, "r", encoding="ascii") as fh:
            obj = json.load(fh)
        p = int_from_b64(obj["p"])
        q = int_from_b64(obj["q"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StoreFormatError(f"bad secret key file: {exc}") from exc
    if p * q != pk.modulus:
        raise IntegrityError("secret key factors do not multiply to N")
    if not (is_probable_prime(p) and is_probable_prime(q)):
        raise IntegrityError("secret key factor fails the primality check")
    sk = SecretKey.from_primes(p, q)
    return pk, sk
