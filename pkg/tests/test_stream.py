import hashlib
import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from moebius_crypto.errors import (
    AuthenticityNotProvided,
    FieldTooSmall,
    InvalidContainer,
    KeyMismatch,
    KeysourceExhausted,
    LengthMismatch,
    MalformedTag,
)
from moebius_crypto.field import ext_make, extension_for, field_make
from moebius_crypto.plane import INF
from moebius_crypto.stream import (
    Codec,
    Container,
    Keystream,
    Reader,
    bits_per_point,
    decode_points,
    decrypt_stream,
    derive_explicit_keys,
    encode_bytes,
    encrypt_stream,
    keys_from_bytes,
    keys_to_bytes,
    keystream_from_bytes,
    keystream_to_bytes,
    random_points,
    read_field_block,
    write_field_block,
    write_varint,
)

EXT8 = extension_for(256)
EXT4 = extension_for(4)


# -- encoding -----------------------------------------------------------------------
def test_empty_input():
    assert encode_bytes(b"", EXT8) == ([], 0)
    assert decode_points([], 0, EXT8) == b""


def test_single_byte_is_one_triple():
    triples, nbits = encode_bytes(b"\xa5", EXT8)
    assert len(triples) == 1 and nbits == 8 and bits_per_point(EXT8) == 14


def test_encoding_round_trip_n8():
    rng = random.Random(8)
    for _ in range(10_000):
        data = rng.randbytes(rng.randrange(0, 48))
        triples, nbits = encode_bytes(data, EXT8)
        for t in triples:
            assert len(set(t)) == 3
        assert decode_points(triples, nbits, EXT8) == data


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=40), st.sampled_from([2, 3, 4, 5, 7]))
def test_encoding_round_trip_any_width(data, n):
    ext = extension_for(2**n)
    triples, nbits = encode_bytes(data, ext)
    assert all(len(set(t)) == 3 for t in triples)
    assert decode_points(triples, nbits, ext) == data


def reference_encode(data, ext):
    """Whole-message big-integer packing, as a slow oracle."""
    n, q = ext.base.n, ext.q
    per = 2 * n - 2
    nbits = 8 * len(data)
    count = -(-nbits // (3 * per))
    total = count * 3 * per
    value = int.from_bytes(data, "big") << (total - nbits)
    out = []
    for t in range(count):
        pts = []
        for tag in (1, 2, 3):
            shift = total - per * (3 * t + tag)
            chunk = (value >> shift) & ((1 << per) - 1)
            pts.append((chunk >> (n - 2)) + q * ((tag << (n - 2)) | (chunk & ((1 << (n - 2)) - 1))))
        out.append(tuple(pts))
    return out


@pytest.mark.parametrize("n", [2, 3, 5, 8, 11])
def test_block_encoding_matches_reference(n):
    ext = extension_for(2**n)
    rng = random.Random(n)
    for size in list(range(0, 30)) + [257, 1000]:
        data = rng.randbytes(size)
        assert encode_bytes(data, ext)[0] == reference_encode(data, ext)


def test_corrupted_tag():
    triples, nbits = encode_bytes(b"abc", EXT8)
    bad = [list(t) for t in triples]
    bad[0][1] = bad[0][0]
    with pytest.raises(MalformedTag):
        decode_points(bad, nbits, EXT8)
    bad[0][1] = INF
    with pytest.raises(MalformedTag):
        decode_points(bad, nbits, EXT8)


def test_length_mismatch():
    triples, nbits = encode_bytes(b"abcdef", EXT8)
    with pytest.raises(LengthMismatch):
        decode_points(triples[:-1], nbits, EXT8)
    with pytest.raises(LengthMismatch):
        decode_points(triples, nbits - 3, EXT8)


def test_field_too_small():
    for ext in (extension_for(2), extension_for(3), extension_for(9)):
        with pytest.raises(FieldTooSmall):
            encode_bytes(b"x", ext)


# -- primitives ------------------------------------------------------------------------------
@pytest.mark.parametrize("v", [0, 1, 127, 128, 300, 2**35 + 7])
def test_varint_round_trip(v):
    out = io.BytesIO()
    write_varint(out, v)
    r = Reader(out.getvalue())
    assert r.varint() == v and r.at_end


def test_truncated_varint():
    with pytest.raises(InvalidContainer):
        Reader(b"\x80\x80").varint()


@pytest.mark.parametrize("q", [4, 9, 256, 2**16])
def test_field_block_round_trip(q):
    ext = extension_for(q)
    out = io.BytesIO()
    write_field_block(out, ext)
    blob = out.getvalue()
    assert blob[0] == 0xF7
    back = read_field_block(Reader(blob))
    assert back == ext


def test_codec_points_and_circles():
    from moebius_crypto.plane import MoebiusPlane

    P = MoebiusPlane(EXT4)
    codec = Codec(EXT4)
    out = io.BytesIO()
    for z in P.points():
        codec.put_point(out, z)
    for C in P.circles():
        codec.put_circle(out, C)
    r = Reader(out.getvalue())
    assert [codec.get_point(r) for _ in P.points()] == P.points()
    assert [codec.get_circle(r, P) for _ in P.circles()] == P.circles()
    assert r.at_end


# -- key material ------------------------------------------------------------------------------
def test_seeded_points_are_deterministic_and_in_range():
    a = list(random_points(EXT8, 7, limit=500))
    assert a == list(random_points(EXT8, 7, limit=500))
    assert a != list(random_points(EXT8, 8, limit=500))
    assert all(0 <= z < EXT8.order for z in a)
    odd = list(random_points(extension_for(3), 1, limit=2000))
    assert set(odd) == set(range(9))


def test_keystream_file_size():
    blob = keystream_to_bytes(EXT8, random_points(EXT8, 1, limit=3000))
    ext, pts = keystream_from_bytes(blob)
    assert ext == EXT8 and len(pts) == 3000
    header = len(blob) - 3000 * 2
    assert len(blob) == 6020 and header == 20


def test_keystream_file_rejects_partial_point():
    blob = keystream_to_bytes(EXT8, random_points(EXT8, 1, limit=10))
    with pytest.raises(InvalidContainer):
        keystream_from_bytes(blob[:-1])
    with pytest.raises(InvalidContainer):
        keystream_from_bytes(b"XXXX" + blob[4:])


def test_key_file_round_trip():
    keys = derive_explicit_keys(b"key file", EXT8, random_points(EXT8, 3))
    ext, back = keys_from_bytes(keys_to_bytes(EXT8, keys))
    assert ext == EXT8 and back == keys


def test_keystream_counts_and_exhausts():
    ks = Keystream([1, 2])
    assert next(ks) == 1 and ks.consumed == 1
    next(ks)
    with pytest.raises(KeysourceExhausted):
        next(ks)


# -- containers ----------------------------------------------------------------------------------
def test_stream_round_trips_n8():
    rng = random.Random(1)
    for i in range(1000):
        data = rng.randbytes(rng.randrange(0, 24))
        c = encrypt_stream(data, EXT8, "stream", keystream=random_points(EXT8, i))
        blob = c.to_bytes()
        back = Container.from_bytes(blob)
        assert back.to_bytes() == blob
        assert decrypt_stream(back, keystream=random_points(EXT8, i)) == data


@pytest.mark.parametrize("q", [4, 8, 16])
def test_stream_round_trip_small_fields(q):
    ext = extension_for(q)
    rng = random.Random(q)
    for i in range(100):
        data = rng.randbytes(rng.randrange(1, 12))
        c = encrypt_stream(data, ext, "stream", keystream=random_points(ext, i))
        assert decrypt_stream(Container.from_bytes(c.to_bytes()), keystream=random_points(ext, i)) == data


def test_golden_container_q4():
    c = encrypt_stream(b"Moebius", EXT4, "stream", keystream=random_points(EXT4, 2024))
    blob = c.to_bytes()
    assert len(blob) == 148
    assert hashlib.sha256(blob).hexdigest() == "05d260c9651733490aca107b909400ed87ae3ec206f9b6f2c36993e0dbaa837e"
    acc = c.key_accounting()
    assert (acc["triples"], acc["fallback_triples"], acc["skipped_candidates"]) == (10, 1, 64)
    assert decrypt_stream(Container.from_bytes(blob), keystream=random_points(EXT4, 2024)) == b"Moebius"


def test_empty_container():
    c = encrypt_stream(b"", EXT8, "stream", keystream=random_points(EXT8, 0))
    assert c.records == [] and decrypt_stream(Container.from_bytes(c.to_bytes()), keystream=[]) == b""


def test_invalid_containers():
    blob = encrypt_stream(b"hello", EXT8, "stream", keystream=random_points(EXT8, 2)).to_bytes()
    for bad in (blob[:-1], blob + b"\x00", b"MOBX" + blob[4:], blob[:4] + b"\x09" + blob[5:], b""):
        with pytest.raises(InvalidContainer):
            Container.from_bytes(bad)


def test_line_key_accounting():
    data = bytes(range(256)) * 4
    ks = Keystream(random_points(EXT8, 11))
    c = encrypt_stream(data, EXT8, "stream", keystream=ks)
    acc = c.key_accounting()
    assert acc["line_key_points"] == acc["line_message_points"] == 3 * acc["line_triples"]
    assert ks.consumed == acc["accepted_key_points"] + acc["skipped_candidates"]


def test_keysource_exhausted():
    with pytest.raises(KeysourceExhausted):
        encrypt_stream(b"too long for this", EXT8, "stream", keystream=random_points(EXT8, 1, limit=5))
    c = encrypt_stream(b"abc", EXT8, "stream", keystream=random_points(EXT8, 1))
    with pytest.raises(KeysourceExhausted):
        decrypt_stream(c, keystream=random_points(EXT8, 1, limit=2))


def test_wrong_seed_is_key_mismatch():
    data = b"a longer message so that a wrong keystream cannot decode by chance"
    c = encrypt_stream(data, EXT8, "stream", keystream=random_points(EXT8, 5))
    with pytest.raises(KeyMismatch):
        decrypt_stream(c, keystream=random_points(EXT8, 6))


def test_explicit_mode_round_trip():
    data = b"explicit keys"
    keys = derive_explicit_keys(data, EXT8, random_points(EXT8, 9))
    c = encrypt_stream(data, EXT8, "explicit", keys=keys)
    back = Container.from_bytes(c.to_bytes())
    assert back.mode == 0 and decrypt_stream(back, keys=keys) == data
    with pytest.raises(KeyMismatch):
        encrypt_stream(data, EXT8, "explicit", keys=keys[:-1])
    with pytest.raises(KeyMismatch):
        decrypt_stream(back, keys=keys[1:])
    other = derive_explicit_keys(b"something else", EXT8, random_points(EXT8, 9))
    with pytest.raises(KeyMismatch):
        encrypt_stream(data, EXT8, "explicit", keys=other[: len(keys)])


def test_no_integrity_protection():
    c = encrypt_stream(b"x", EXT8, "stream", keystream=random_points(EXT8, 1))
    with pytest.raises(AuthenticityNotProvided):
        c.verify_integrity()


def test_custom_polynomials_survive_the_container():
    F = field_make(2, 4, (1, 0, 0, 1, 1))
    ext = ext_make(F)
    c = encrypt_stream(b"poly", ext, "stream", keystream=random_points(ext, 4))
    back = Container.from_bytes(c.to_bytes())
    assert back.ext == ext and decrypt_stream(back, keystream=random_points(ext, 4)) == b"poly"
