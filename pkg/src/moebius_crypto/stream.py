"""Byte-stream mode: encoding bytes as point triples, key sources, containers.

Wire conventions
----------------
* varints are unsigned LEB128.
* An element of F is its integer code, little-endian, in ``ceil(bits(q-1)/8)``
  bytes; an element of G is (re, im) as two F elements.
* Field block: ``0xF7``, p, n (varints), the n+1 coefficients of the
  irreducible polynomial (each in the byte width of p-1), a presence byte,
  then the three quadratic coefficients (b0, b1, 1) as F elements.
* Point: tag byte 0 + re + im, or tag byte 1 for INF.
* Circle: alpha, beta.re, beta.im, gamma as F elements.

Containers are ``MOBC`` (ciphertext), ``MOBK`` (explicit keys) and ``MOBS``
(shared keystream of untagged finite points).
"""
from __future__ import annotations

import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .cipher import CipherTriple, KeyTriple, MoebiusCipher
from .errors import (
    AuthenticityNotProvided,
    CandidateStreamExhausted,
    FieldTooSmall,
    InvalidContainer,
    InvalidKey,
    KeyMismatch,
    KeysourceExhausted,
    LengthMismatch,
    MalformedTag,
)
from .field import ExtCtx, ext_make, field_make
from .plane import INF, Circle, MoebiusPlane, Point

FIELD_MAGIC = 0xF7
CONTAINER_MAGIC = b"MOBC"
KEYFILE_MAGIC = b"MOBK"
KEYSTREAM_MAGIC = b"MOBS"
VERSION = 1

MODE_EXPLICIT = 0
MODE_STREAM = 1
MODE_NAMES = {"explicit": MODE_EXPLICIT, "stream": MODE_STREAM}


# -- point encoding ------------------------------------------------------------
def _char2_degree(ext: ExtCtx) -> int:
    if ext.base.p != 2 or ext.base.n < 2:
        raise FieldTooSmall("byte encoding needs q = 2^n with n >= 2")
    return ext.base.n


def bits_per_point(ext: ExtCtx) -> int:
    return 2 * _char2_degree(ext) - 2


def triple_count(ext: ExtCtx, bit_length: int) -> int:
    per = 3 * bits_per_point(ext)
    return -(-bit_length // per)


def _block(ext: ExtCtx) -> tuple[int, int]:
    """(triples, bytes) per block: the smallest whole number of each."""
    bits = math.lcm(3 * bits_per_point(ext), 8)
    return bits // (3 * bits_per_point(ext)), bits // 8


def encode_bytes(data: bytes, ext: ExtCtx) -> tuple[list[tuple[int, int, int]], int]:
    """Split data into point triples; returns (triples, exact bit length).

    Every point carries 2n-2 payload bits: n in re, n-2 in the low part of
    im.  The top two bits of im hold the position tag 1, 2 or 3, so the
    points of a triple are always distinct.  The tail is zero-padded.
    """
    n = _char2_degree(ext)
    q, per = ext.q, 2 * n - 2
    nbits = 8 * len(data)
    count = triple_count(ext, nbits)
    # work block by block so the cost stays linear in the input length
    block_triples, block_bytes = _block(ext)
    padded = data + bytes(-len(data) % block_bytes)
    low_mask, chunk_mask = (1 << (n - 2)) - 1, (1 << per) - 1
    triples = []
    for start in range(0, len(padded), block_bytes):
        value = int.from_bytes(padded[start : start + block_bytes], "big")
        shift = 8 * block_bytes
        for _ in range(block_triples):
            pts = []
            for tag in (1, 2, 3):
                shift -= per
                chunk = (value >> shift) & chunk_mask
                re, low = chunk >> (n - 2), chunk & low_mask
                pts.append(re + q * ((tag << (n - 2)) | low))
            triples.append(tuple(pts))
    return triples[:count], nbits


def decode_points(triples: Sequence[Sequence[Point]], bit_length: int, ext: ExtCtx) -> bytes:
    """Inverse of :func:`encode_bytes`; checks tags and strips padding."""
    n = _char2_degree(ext)
    q, per = ext.q, 2 * n - 2
    if len(triples) != triple_count(ext, bit_length) or bit_length % 8:
        raise LengthMismatch(f"{len(triples)} triples cannot hold {bit_length} bits")
    block_triples, block_bytes = _block(ext)
    low_mask = (1 << (n - 2)) - 1
    out = bytearray()
    for start in range(0, len(triples), block_triples):
        group = triples[start : start + block_triples]
        value = 0
        for triple in group:
            if len(triple) != 3:
                raise LengthMismatch("triples must have three points")
            for tag, z in zip((1, 2, 3), triple):
                if z is INF:
                    raise MalformedTag("INF carries no payload")
                re, im = z % q, z // q
                if im >> (n - 2) != tag:
                    raise MalformedTag(f"point {z} has tag {im >> (n - 2)}, expected {tag}")
                value = (value << per) | (re << (n - 2)) | (im & low_mask)
        value <<= 3 * per * (block_triples - len(group))
        out += value.to_bytes(block_bytes, "big")
    return bytes(out[: bit_length // 8])


# -- primitive codecs ------------------------------------------------------------
def write_varint(out: io.BytesIO, v: int) -> None:
    if v < 0:
        raise ValueError("varints are unsigned")
    while True:
        b = v & 0x7F
        v >>= 7
        out.write(bytes([b | (0x80 if v else 0)]))
        if not v:
            return


class Reader:
    """Cursor over a byte string; every short read is an InvalidContainer."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise InvalidContainer("truncated input")
        chunk = self.data[self.pos : self.pos + k]
        self.pos += k
        return chunk

    def byte(self) -> int:
        return self.take(1)[0]

    def varint(self) -> int:
        v = shift = 0
        while True:
            b = self.byte()
            v |= (b & 0x7F) << shift
            if not b & 0x80:
                return v
            shift += 7
            if shift > 63:
                raise InvalidContainer("varint too long")

    def int_le(self, width: int) -> int:
        return int.from_bytes(self.take(width), "little")

    @property
    def at_end(self) -> bool:
        return self.pos == len(self.data)


def _width(maximum: int) -> int:
    return max(1, (maximum.bit_length() + 7) // 8)


class Codec:
    """Serializer for elements, points and circles of one extension."""

    def __init__(self, ext: ExtCtx):
        self.ext = ext
        self.q = ext.q
        self.width = _width(ext.q - 1)

    def put_elem(self, out: io.BytesIO, a: int) -> None:
        out.write(a.to_bytes(self.width, "little"))

    def get_elem(self, r: Reader) -> int:
        a = r.int_le(self.width)
        if a >= self.q:
            raise InvalidContainer(f"element code {a} out of range")
        return a

    def put_point(self, out: io.BytesIO, z: Point, tagged: bool = True) -> None:
        if z is INF:
            if not tagged:
                raise ValueError("untagged points must be finite")
            out.write(b"\x01")
            return
        if tagged:
            out.write(b"\x00")
        self.put_elem(out, z % self.q)
        self.put_elem(out, z // self.q)

    def get_point(self, r: Reader, tagged: bool = True) -> Point:
        if tagged:
            tag = r.byte()
            if tag == 1:
                return INF
            if tag != 0:
                raise InvalidContainer(f"bad point tag {tag}")
        re = self.get_elem(r)
        return re + self.q * self.get_elem(r)

    def put_circle(self, out: io.BytesIO, C: Circle) -> None:
        for a in (C.alpha, C.beta % self.q, C.beta // self.q, C.gamma):
            self.put_elem(out, a)

    def get_circle(self, r: Reader, plane: MoebiusPlane) -> Circle:
        alpha, b0, b1, gamma = (self.get_elem(r) for _ in range(4))
        try:
            C = plane.circle(alpha, b0 + self.q * b1, gamma)
        except ValueError as exc:
            raise InvalidContainer(f"bad circle: {exc}") from exc
        if C != Circle(alpha, b0 + self.q * b1, gamma):
            raise InvalidContainer("circle not in canonical form")
        return C


def write_field_block(out: io.BytesIO, ext: ExtCtx) -> None:
    F = ext.base
    out.write(bytes([FIELD_MAGIC]))
    write_varint(out, F.p)
    write_varint(out, F.n)
    rw = _width(F.p - 1)
    for c in F.irreducible:
        out.write(c.to_bytes(rw, "little"))
    out.write(b"\x01")
    codec = Codec(ext)
    for c in ext.quadratic:
        codec.put_elem(out, c)


def read_field_block(r: Reader) -> ExtCtx:
    if r.byte() != FIELD_MAGIC:
        raise InvalidContainer("missing field block")
    p, n = r.varint(), r.varint()
    if p < 2 or n < 1 or n > 64:
        raise InvalidContainer("implausible field parameters")
    rw = _width(p - 1)
    poly = tuple(r.int_le(rw) for _ in range(n + 1))
    try:
        F = field_make(p, n, poly)
    except ValueError as exc:
        raise InvalidContainer(f"bad base field: {exc}") from exc
    present = r.byte()
    if present not in (0, 1):
        raise InvalidContainer("bad quadratic presence byte")
    if not present:
        return ext_make(F)
    width = _width(F.q - 1)
    quad = tuple(r.int_le(width) for _ in range(3))
    try:
        return ext_make(F, quad)
    except ValueError as exc:
        raise InvalidContainer(f"bad extension: {exc}") from exc


# -- key sources -----------------------------------------------------------------
class CounterStream:
    """Deterministic byte stream: SHA-256 over (label, seed, block counter)."""

    LABEL = b"moebius-keystream-v1"

    def __init__(self, seed: int):
        self.seed = seed.to_bytes(16, "big", signed=True)
        self.counter = 0
        self.buf = b""

    def read(self, k: int) -> bytes:
        while len(self.buf) < k:
            block = hashlib.sha256(self.LABEL + self.seed + self.counter.to_bytes(8, "big")).digest()
            self.buf += block
            self.counter += 1
        out, self.buf = self.buf[:k], self.buf[k:]
        return out


class SystemStream:
    def read(self, k: int) -> bytes:
        return os.urandom(k)


def random_points(ext: ExtCtx, seed: int | None = None, limit: int | None = None) -> Iterator[int]:
    """Uniform finite points from a seeded counter stream or system entropy.

    Uses rejection sampling on masked integers, so points are exactly uniform.
    """
    src = CounterStream(seed) if seed is not None else SystemStream()
    order = ext.order
    nbits = (order - 1).bit_length()
    nbytes, mask = (nbits + 7) // 8, (1 << nbits) - 1
    produced = 0
    while limit is None or produced < limit:
        z = int.from_bytes(src.read(nbytes), "big") & mask
        if z < order:
            produced += 1
            yield z


class Keystream:
    """Single-consumer candidate iterator that raises when material runs out."""

    def __init__(self, points: Iterable[Point]):
        self._it = iter(points)
        self.consumed = 0

    def __iter__(self) -> "Keystream":
        return self

    def __next__(self) -> Point:
        try:
            z = next(self._it)
        except StopIteration:
            raise KeysourceExhausted("keystream exhausted") from None
        self.consumed += 1
        return z


# -- files -----------------------------------------------------------------------
def keystream_to_bytes(ext: ExtCtx, points: Iterable[int]) -> bytes:
    out = io.BytesIO()
    out.write(KEYSTREAM_MAGIC)
    write_field_block(out, ext)
    codec = Codec(ext)
    for z in points:
        codec.put_point(out, z, tagged=False)
    return out.getvalue()


def keystream_from_bytes(data: bytes) -> tuple[ExtCtx, list[int]]:
    r = Reader(data)
    if r.take(4) != KEYSTREAM_MAGIC:
        raise InvalidContainer("not a keystream file")
    ext = read_field_block(r)
    codec = Codec(ext)
    if (len(data) - r.pos) % (2 * codec.width):
        raise InvalidContainer("keystream payload is not a whole number of points")
    pts = []
    while not r.at_end:
        pts.append(codec.get_point(r, tagged=False))
    return ext, pts


def keys_to_bytes(ext: ExtCtx, keys: Iterable[KeyTriple]) -> bytes:
    out = io.BytesIO()
    out.write(KEYFILE_MAGIC)
    write_field_block(out, ext)
    codec = Codec(ext)
    for key in keys:
        for C in key.circles:
            codec.put_circle(out, C)
    return out.getvalue()


def keys_from_bytes(data: bytes) -> tuple[ExtCtx, list[KeyTriple]]:
    r = Reader(data)
    if r.take(4) != KEYFILE_MAGIC:
        raise InvalidContainer("not a key file")
    ext = read_field_block(r)
    codec, plane = Codec(ext), MoebiusPlane(ext)
    if (len(data) - r.pos) % (12 * codec.width):
        raise InvalidContainer("key payload is not a whole number of key triples")
    keys = []
    while not r.at_end:
        keys.append(KeyTriple(*(codec.get_circle(r, plane) for _ in range(3))))
    return ext, keys


@dataclass
class Record:
    points: tuple[Point, Point, Point]
    fallback: bool = False
    skips: tuple[int, ...] = ()


@dataclass
class Container:
    ext: ExtCtx
    mode: int
    bit_length: int
    records: list[Record] = field(default_factory=list)

    def to_bytes(self) -> bytes:
        out = io.BytesIO()
        out.write(CONTAINER_MAGIC)
        out.write(bytes([VERSION]))
        write_field_block(out, self.ext)
        out.write(bytes([self.mode]))
        write_varint(out, self.bit_length)
        codec = Codec(self.ext)
        for rec in self.records:
            out.write(bytes([int(rec.fallback)]))
            if self.mode == MODE_STREAM:
                for s in rec.skips:
                    write_varint(out, s)
            for z in rec.points:
                codec.put_point(out, z)
        return out.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Container":
        r = Reader(data)
        if r.take(4) != CONTAINER_MAGIC:
            raise InvalidContainer("not a ciphertext container")
        if r.byte() != VERSION:
            raise InvalidContainer("unsupported container version")
        ext = read_field_block(r)
        mode = r.byte()
        if mode not in (MODE_EXPLICIT, MODE_STREAM):
            raise InvalidContainer(f"unknown mode {mode}")
        bit_length = r.varint()
        try:
            count = triple_count(ext, bit_length)
        except FieldTooSmall as exc:
            raise InvalidContainer(str(exc)) from exc
        codec = Codec(ext)
        records = []
        for _ in range(count):
            flag = r.byte()
            if flag not in (0, 1):
                raise InvalidContainer("bad fallback flag")
            skips: tuple[int, ...] = ()
            if mode == MODE_STREAM:
                skips = tuple(r.varint() for _ in range(6 if flag else 3))
            pts = tuple(codec.get_point(r) for _ in range(3))
            records.append(Record(pts, bool(flag), skips))  # type: ignore[arg-type]
        if not r.at_end:
            raise InvalidContainer("trailing bytes after last record")
        return cls(ext, mode, bit_length, records)

    def key_accounting(self) -> dict:
        """Key material per message point, skips and padding excluded."""
        line = [r for r in self.records if not r.fallback]
        return {
            "triples": len(self.records),
            "line_triples": len(line),
            "fallback_triples": len(self.records) - len(line),
            "message_points": 3 * len(self.records),
            "accepted_key_points": sum(6 if r.fallback else 3 for r in self.records),
            "line_key_points": 3 * len(line),
            "line_message_points": 3 * len(line),
            "skipped_candidates": sum(sum(r.skips) for r in self.records),
        }

    def verify_integrity(self) -> None:
        raise AuthenticityNotProvided("containers carry no authentication tag")


# -- stream encryption -----------------------------------------------------------
def encrypt_stream(
    data: bytes,
    ext: ExtCtx,
    mode: str = "stream",
    keystream: Iterable[Point] | None = None,
    keys: Sequence[KeyTriple] | None = None,
) -> Container:
    """Encrypt bytes triple by triple with fresh keys for every triple.

    ``stream`` mode draws candidate points from ``keystream`` and records
    skip counts; ``explicit`` mode applies the given per-triple ``keys``.
    """
    cipher = MoebiusCipher(MoebiusPlane(ext))
    triples, nbits = encode_bytes(data, ext)
    records = []
    if mode == "stream":
        if keystream is None:
            raise ValueError("stream mode needs a keystream")
        ks = keystream if isinstance(keystream, Keystream) else Keystream(keystream)
        for pts in triples:
            msg = cipher.message(*pts)
            try:
                dk = cipher.derive_keys(msg, ks)
            except KeysourceExhausted:
                raise
            except CandidateStreamExhausted as exc:
                raise KeysourceExhausted(str(exc)) from exc
            ct = cipher.encrypt_triple(msg, dk.key)
            records.append(Record(ct.points, dk.fallback, dk.skips))
    elif mode == "explicit":
        if keys is None:
            raise ValueError("explicit mode needs keys")
        if len(keys) != len(triples):
            raise KeyMismatch(f"{len(keys)} key triples for {len(triples)} message triples")
        for pts, key in zip(triples, keys):
            try:
                ct = cipher.encrypt_triple(cipher.message(*pts), key)
            except InvalidKey as exc:
                raise KeyMismatch(f"key does not fit this plaintext: {exc}") from exc
            records.append(Record(ct.points, any(K.alpha for K in key.circles)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Container(ext, MODE_NAMES[mode], nbits, records)


def decrypt_stream(
    container: Container,
    keystream: Iterable[Point] | None = None,
    keys: Sequence[KeyTriple] | None = None,
) -> bytes:
    """Replay key selection (or apply explicit keys) and decode."""
    cipher = MoebiusCipher(MoebiusPlane(container.ext))
    plain = []
    if container.mode == MODE_STREAM:
        if keystream is None:
            raise ValueError("stream containers need the shared keystream")
        ks = keystream if isinstance(keystream, Keystream) else Keystream(keystream)
        for rec in container.records:
            ct = _cipher_triple(rec.points)
            try:
                key = cipher.replay_keys(ct, ks, rec.skips, rec.fallback)
                plain.append(cipher.decrypt_triple(ct, key).points)
            except KeysourceExhausted:
                raise
            except (InvalidKey, ValueError) as exc:
                raise KeyMismatch(f"keystream does not match container: {exc}") from exc
    else:
        if keys is None:
            raise ValueError("explicit containers need the key file")
        if len(keys) != len(container.records):
            raise KeyMismatch(f"{len(keys)} key triples for {len(container.records)} records")
        for rec, key in zip(container.records, keys):
            try:
                plain.append(cipher.decrypt_triple(_cipher_triple(rec.points), key).points)
            except ValueError as exc:
                raise KeyMismatch(f"key does not fit this ciphertext: {exc}") from exc
    try:
        return decode_points(plain, container.bit_length, container.ext)
    except (MalformedTag, LengthMismatch) as exc:
        raise KeyMismatch(f"decrypted points do not decode: {exc}") from exc


def _cipher_triple(points: Sequence[Point]) -> CipherTriple:
    if len(set(points)) != 3:
        raise InvalidContainer("ciphertext points must be pairwise distinct")
    return CipherTriple(*points)


def derive_explicit_keys(data: bytes, ext: ExtCtx, keystream: Iterable[Point]) -> list[KeyTriple]:
    """Per-triple keys for ``data``, drawn from a candidate stream."""
    cipher = MoebiusCipher(MoebiusPlane(ext))
    ks = keystream if isinstance(keystream, Keystream) else Keystream(keystream)
    triples, _ = encode_bytes(data, ext)
    return [cipher.derive_keys(cipher.message(*pts), ks).key for pts in triples]


__all__ = [
    "Container",
    "Record",
    "Keystream",
    "CounterStream",
    "Codec",
    "bits_per_point",
    "triple_count",
    "encode_bytes",
    "decode_points",
    "encrypt_stream",
    "decrypt_stream",
    "derive_explicit_keys",
    "random_points",
    "keystream_to_bytes",
    "keystream_from_bytes",
    "keys_to_bytes",
    "keys_from_bytes",
    "write_field_block",
    "read_field_block",
]
