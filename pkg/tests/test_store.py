import json
import random
import stat

import pytest

from ahevdb.encoding import EncodingParams, decode_score
from ahevdb.errors import (
    IntegrityError,
    KeyMismatchError,
    StoreCorruptError,
    StoreFormatError,
    ValidationError,
)
from ahevdb.paillier import b64_int, decrypt, encrypt
from ahevdb.similarity import encrypt_vector
from ahevdb.store import (
    MAGIC,
    StoreRecord,
    load_db,
    load_keys,
    load_public_key,
    make_header,
    record_to_enc_vector,
    save_db,
    save_keys,
)


@pytest.fixture(scope="module")
def db_parts(key128):
    pk, sk = key128
    params = EncodingParams(frac_bits=0, max_abs=100.0, modulus=pk.modulus)
    rows = {"alpha": (1, 2, 3), "beta": (-4, 5, 6), "gamma": (7, 0, -9)}
    records = tuple(
        StoreRecord(label=k, cts=encrypt_vector(pk, params, v, label=k).cts)
        for k, v in rows.items())
    header = make_header(pk, params, dim=3, count=len(records))
    return pk, sk, params, header, records, rows


def test_save_load_round_trip(tmp_path, db_parts):
    pk, _, _, header, records, _ = db_parts
    path = tmp_path / "vectors.db"
    save_db(path, header, records)
    loaded_header, loaded_records = load_db(path, pk)
    assert loaded_header == header
    assert tuple(loaded_records) == records


def test_round_trip_is_byte_identical(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    first = tmp_path / "a.db"
    second = tmp_path / "b.db"
    save_db(first, header, records)
    loaded_header, loaded_records = load_db(first)
    save_db(second, loaded_header, loaded_records)
    assert first.read_bytes() == second.read_bytes()


def test_loaded_records_still_decrypt(tmp_path, db_parts):
    pk, sk, params, header, records, rows = db_parts
    path = tmp_path / "vectors.db"
    save_db(path, header, records)
    loaded_header, loaded_records = load_db(path, pk)
    rng = random.Random(3)
    for record in rng.sample(loaded_records, len(loaded_records)):
        vec = record_to_enc_vector(loaded_header, record)
        values = [decode_score(params, decrypt(sk, c)) for c in vec.cts]
        assert values == [float(v) for v in rows[record.label]]


def test_file_starts_with_magic_and_header_line(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "vectors.db"
    save_db(path, header, records)
    raw = path.read_bytes()
    assert raw.startswith(MAGIC)
    header_line = raw[len(MAGIC):raw.index(b"\n")]
    obj = json.loads(header_line)
    assert obj["dim"] == 3 and obj["count"] == 3
    assert obj["params"] == {"f": 0, "x_max": 100.0}


def test_empty_db_round_trips(tmp_path, db_parts):
    pk, _, params, _, _, _ = db_parts
    path = tmp_path / "empty.db"
    save_db(path, make_header(pk, params, dim=5, count=0), [])
    header, records = load_db(path, pk)
    assert header.count == 0 and records == []


def test_save_rejects_duplicate_labels(tmp_path, db_parts):
    pk, _, params, _, records, _ = db_parts
    dup = [records[0], StoreRecord(label=records[0].label, cts=records[1].cts)]
    header = make_header(pk, params, dim=3, count=2)
    with pytest.raises(ValidationError, match="duplicate"):
        save_db(tmp_path / "dup.db", header, dup)


def test_save_rejects_count_and_dim_mismatch(tmp_path, db_parts):
    pk, _, params, _, records, _ = db_parts
    with pytest.raises(ValidationError):
        save_db(tmp_path / "x.db", make_header(pk, params, dim=3, count=5),
                records)
    short = [StoreRecord(label="short", cts=records[0].cts[:2])]
    with pytest.raises(ValidationError):
        save_db(tmp_path / "y.db", make_header(pk, params, dim=3, count=1),
                short)


def test_save_rejects_foreign_ciphertexts(tmp_path, db_parts, key256):
    pk, _, params, _, _, _ = db_parts
    pk256 = key256[0]
    params256 = EncodingParams(frac_bits=0, max_abs=100.0, modulus=pk256.modulus)
    foreign = StoreRecord(
        label="foreign", cts=encrypt_vector(pk256, params256, (1, 2, 3)).cts)
    header = make_header(pk, params, dim=3, count=1)
    with pytest.raises(ValidationError):
        save_db(tmp_path / "z.db", header, [foreign])


def test_save_rejects_oversized_label(tmp_path, db_parts):
    pk, _, params, _, records, _ = db_parts
    big = StoreRecord(label="x" * 257, cts=records[0].cts)
    header = make_header(pk, params, dim=3, count=1)
    with pytest.raises(ValidationError, match="256"):
        save_db(tmp_path / "big.db", header, [big])


def test_unicode_label_round_trips(tmp_path, key128):
    pk, _ = key128
    params = EncodingParams(frac_bits=0, max_abs=10.0, modulus=pk.modulus)
    record = StoreRecord(label="véc-テスト",
                         cts=encrypt_vector(pk, params, (1,)).cts)
    path = tmp_path / "uni.db"
    save_db(path, make_header(pk, params, dim=1, count=1), [record])
    _, records = load_db(path)
    assert records[0].label == record.label


def test_failed_save_leaves_existing_file_intact(tmp_path, db_parts):
    pk, _, params, header, records, _ = db_parts
    path = tmp_path / "keep.db"
    save_db(path, header, records)
    before = path.read_bytes()
    bad = [records[0], StoreRecord(label=records[0].label, cts=records[1].cts)]
    with pytest.raises(ValidationError):
        save_db(path, make_header(pk, params, dim=3, count=2), bad)
    assert path.read_bytes() == before


def test_load_rejects_flipped_magic(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "bad-magic.db"
    save_db(path, header, records)
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(StoreFormatError):
        load_db(path)


def test_load_rejects_truncated_file(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "cut.db"
    save_db(path, header, records)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 7])
    with pytest.raises(StoreCorruptError):
        load_db(path)


def test_load_rejects_trailing_garbage(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "tail.db"
    save_db(path, header, records)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(StoreCorruptError):
        load_db(path)


def test_load_rejects_mangled_header(tmp_path, db_parts):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "hdr.db"
    save_db(path, header, records)
    raw = path.read_bytes()
    mangled = MAGIC + b"{not json}" + raw[raw.index(b"\n"):]
    path.write_bytes(mangled)
    with pytest.raises(StoreFormatError):
        load_db(path)


def test_load_under_wrong_key_is_a_key_mismatch(tmp_path, db_parts, key256):
    _, _, _, header, records, _ = db_parts
    path = tmp_path / "wrongkey.db"
    save_db(path, header, records)
    with pytest.raises(KeyMismatchError):
        load_db(path, key256[0])
    # without a key the load still succeeds; the caller opted out of the check
    loaded_header, _ = load_db(path)
    assert loaded_header == header


def test_missing_file_surfaces_as_oserror(tmp_path):
    with pytest.raises(OSError):
        load_db(tmp_path / "nope.db")


# --- key files ---

def test_key_files_round_trip(tmp_path, key128):
    pk, sk = key128
    pub, sec = tmp_path / "key.pub", tmp_path / "key.sec"
    save_keys(pub, sec, pk, sk)
    pk2, sk2 = load_keys(pub, sec)
    assert pk2 == pk
    assert (sk2.p, sk2.q) == (sk.p, sk.q)
    assert decrypt(sk2, encrypt(pk2, 41)) == 41


def test_secret_key_file_is_owner_only(tmp_path, key128):
    pk, sk = key128
    pub, sec = tmp_path / "key.pub", tmp_path / "key.sec"
    save_keys(pub, sec, pk, sk)
    assert stat.S_IMODE(sec.stat().st_mode) == 0o600


def test_public_key_loads_alone(tmp_path, key128):
    pk, sk = key128
    pub, sec = tmp_path / "key.pub", tmp_path / "key.sec"
    save_keys(pub, sec, pk, sk)
    assert load_public_key(pub) == pk


def test_load_public_key_rejects_garbage(tmp_path):
    path = tmp_path / "junk.pub"
    path.write_text("definitely not json")
    with pytest.raises(StoreFormatError):
        load_public_key(path)


def test_load_keys_rejects_corrupted_factor(tmp_path, key128):
    pk, sk = key128
    pub, sec = tmp_path / "key.pub", tmp_path / "key.sec"
    save_keys(pub, sec, pk, sk)
    obj = json.loads(sec.read_text())
    obj["p"] = b64_int(sk.p + 2)  # p*q no longer yields N
    sec.write_text(json.dumps(obj))
    with pytest.raises(IntegrityError):
        load_keys(pub, sec)


def test_load_keys_rejects_composite_factor(tmp_path, key128):
    pk, sk = key128
    pub, sec = tmp_path / "key.pub", tmp_path / "key.sec"
    save_keys(pub, sec, pk, sk)
    # 1 * N = N passes the product check but 1 is not prime
    sec.write_text(json.dumps({"p": b64_int(1), "q": b64_int(pk.modulus)}))
    with pytest.raises(IntegrityError):
        load_keys(pub, sec)
