"""The Möbius cipher on point triples.

A message is an ordered triple of distinct points with circle M through them.
A key is a triple of circles K1, K2, K3 with m_i on K_i, K_i != M, and the
sets M∩K_i pairwise disjoint.  Position i is enciphered to the second common
point of K_i and M (or left alone when K_i touches M), which makes
encryption an involution.

Key circles come from a stream of candidate points.  Line keys use one
point per position: K_i is the line through m_i and k_i.  When M itself
passes through INF no line key can work (every line contains INF), so a
general circle through m_i and two candidate points is used instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    CandidateStreamExhausted,
    DegeneratePoints,
    InvalidKey,
    MessageCircleThroughInfinity,
)
from .plane import INF, Circle, MoebiusPlane, Point


@dataclass(frozen=True)
class MessageTriple:
    m1: Point
    m2: Point
    m3: Point
    circle: Circle

    @property
    def points(self) -> tuple[Point, Point, Point]:
        return (self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class KeyTriple:
    K1: Circle
    K2: Circle
    K3: Circle

    @property
    def circles(self) -> tuple[Circle, Circle, Circle]:
        return (self.K1, self.K2, self.K3)


@dataclass(frozen=True)
class CipherTriple:
    c1: Point
    c2: Point
    c3: Point

    @property
    def points(self) -> tuple[Point, Point, Point]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class LineKeyPoints:
    k1: Point
    k2: Point
    k3: Point

    @property
    def points(self) -> tuple[Point, Point, Point]:
        return (self.k1, self.k2, self.k3)


@dataclass(frozen=True)
class DerivedKey:
    """Result of key derivation: the key, the points used, and replay data.

    ``skips`` holds one count per consumed point slot (3 for line keys,
    6 for the fallback); ``fallback`` marks the general-circle path.
    """

    key: KeyTriple
    key_points: tuple[Point, ...]
    skips: tuple[int, ...]
    fallback: bool = False


class MoebiusCipher:
    def __init__(self, plane: MoebiusPlane):
        self.plane = plane

    @classmethod
    def of_order(cls, q: int) -> "MoebiusCipher":
        return cls(MoebiusPlane.of_order(q))

    # -- triples -----------------------------------------------------------
    def message(self, m1: Point, m2: Point, m3: Point) -> MessageTriple:
        if m1 == m2 or m2 == m3 or m1 == m3:
            raise DegeneratePoints("message points must be pairwise distinct")
        return MessageTriple(m1, m2, m3, self.plane.circle_through(m1, m2, m3))

    def _image(self, M: Circle, K: Circle, m: Point) -> Point:
        return self.plane.second_intersection(K, M, m)

    def validate_key(self, msg: MessageTriple, key: KeyTriple) -> bool:
        """True iff the key satisfies the membership and disjointness rules."""
        M, P = msg.circle, self.plane
        if len(set(key.circles)) < 3:
            return False
        meets = []
        for m, K in zip(msg.points, key.circles):
            if K == M or not P.contains(K, m):
                return False
            meets.append({m, self._image(M, K, m)})
        return not (meets[0] & meets[1] or meets[0] & meets[2] or meets[1] & meets[2])

    def encrypt_triple(self, msg: MessageTriple, key: KeyTriple) -> CipherTriple:
        if not self.validate_key(msg, key):
            raise InvalidKey("key violates the key conditions for this message")
        return CipherTriple(*(self._image(msg.circle, K, m) for m, K in zip(msg.points, key.circles)))

    def decrypt_triple(self, ct: CipherTriple, key: KeyTriple) -> MessageTriple:
        # the key conditions are symmetric in m_i <-> c_i, so decryption is
        # encryption of the ciphertext under the same key
        as_msg = self.message(*ct.points)
        out = self.encrypt_triple(as_msg, key)
        return MessageTriple(out.c1, out.c2, out.c3, as_msg.circle)

    # -- line keys ---------------------------------------------------------
    def line_image(self, msg: MessageTriple, i: int, k: Point) -> Point:
        """Where position i (0-based) goes under the line through m_i and k."""
        m = msg.points[i]
        if m is INF or k is INF or k == m:
            raise DegeneratePoints("line keys need two distinct finite points")
        return self.plane.chord_point(msg.circle, m, self.plane.ext.sub(k, m))

    def _excluded(self, msg: MessageTriple, i: int, prior: Sequence[Point], lookahead: bool) -> set[Point]:
        excl = set(msg.points[:i]) | set(prior[:i])
        if lookahead:
            excl |= set(msg.points[i + 1 :])
        return excl

    def admissible_line_keys(
        self,
        msg: MessageTriple,
        i: int,
        prior: Sequence[Point] = (),
        lookahead: bool = False,
        candidates: Iterable[Point] | None = None,
    ) -> list[Point]:
        """Key points admissible at position i given earlier images ``prior``.

        Without lookahead this is the sequential key set of the analysis: all
        finite points off M whose line sends m_i outside {m_j, c_j : j < i}.
        With lookahead the later message points are excluded as images too,
        which is what keeps every later position solvable.
        """
        P = self.plane
        if P.contains(msg.circle, INF):
            raise MessageCircleThroughInfinity("line keys need INF off the message circle")
        excl = self._excluded(msg, i, prior, lookahead)
        pool = P.finite_points() if candidates is None else candidates
        return [
            k for k in pool
            if k is not INF and not P.contains(msg.circle, k) and self.line_image(msg, i, k) not in excl
        ]

    def derive_line_keys(self, msg: MessageTriple, candidates: Iterable[Point]) -> DerivedKey:
        """Consume candidate points until each position has an admissible line."""
        P = self.plane
        if P.contains(msg.circle, INF):
            raise MessageCircleThroughInfinity("message circle passes through INF")
        it = iter(candidates)
        keys, pts, skips, images = [], [], [], []
        for i, m in enumerate(msg.points):
            excl = self._excluded(msg, i, images, lookahead=True)
            skipped = 0
            for k in it:
                if k is not INF and not P.contains(msg.circle, k):
                    c = self.line_image(msg, i, k)
                    if c not in excl:
                        break
                skipped += 1
            else:
                raise CandidateStreamExhausted(f"no admissible key point for position {i + 1}")
            keys.append(P.line_through(m, k))
            pts.append(k)
            skips.append(skipped)
            images.append(c)
        return DerivedKey(KeyTriple(*keys), tuple(pts), tuple(skips), fallback=False)

    def derive_fallback_keys(self, msg: MessageTriple, candidates: Iterable[Point]) -> DerivedKey:
        """General-circle keys (m_i, k_i, k_i') for a message circle through INF."""
        P = self.plane
        if not P.contains(msg.circle, INF):
            raise ValueError("fallback keys are only used when INF lies on the message circle")
        it = iter(candidates)
        keys, pts, skips, images = [], [], [], []
        for i, m in enumerate(msg.points):
            excl = self._excluded(msg, i, images, lookahead=True)
            s1 = 0
            for k in it:
                if not P.contains(msg.circle, k):
                    break
                s1 += 1
            else:
                raise CandidateStreamExhausted(f"no first key point for position {i + 1}")
            s2 = 0
            for k2 in it:
                if k2 != k and not P.contains(msg.circle, k2):
                    K = P.circle_through(m, k, k2)
                    c = self._image(msg.circle, K, m)
                    if c not in excl:
                        break
                s2 += 1
            else:
                raise CandidateStreamExhausted(f"no second key point for position {i + 1}")
            keys.append(K)
            pts += [k, k2]
            skips += [s1, s2]
            images.append(c)
        return DerivedKey(KeyTriple(*keys), tuple(pts), tuple(skips), fallback=True)

    def derive_keys(self, msg: MessageTriple, candidates: Iterable[Point]) -> DerivedKey:
        if self.plane.contains(msg.circle, INF):
            return self.derive_fallback_keys(msg, candidates)
        return self.derive_line_keys(msg, candidates)

    def replay_keys(
        self, ct: CipherTriple, candidates: Iterator[Point], skips: Sequence[int], fallback: bool
    ) -> KeyTriple:
        """Rebuild the encryptor's key from the shared candidate stream.

        The key circles pass through c_i as well as m_i, so the decryptor
        can reconstruct them from c_i and the accepted candidate points.
        """
        P = self.plane
        per = 2 if fallback else 1
        if len(skips) != 3 * per:
            raise InvalidKey("wrong number of skip counts")
        accepted = []
        for s in skips:
            for _ in range(s):
                if next(candidates, None) is None:
                    raise CandidateStreamExhausted("keystream ended while skipping")
            k = next(candidates, None)
            if k is None:
                raise CandidateStreamExhausted("keystream ended")
            accepted.append(k)
        circles = []
        for i, c in enumerate(ct.points):
            ks = accepted[per * i : per * i + per]
            if c in ks:
                raise InvalidKey("key point coincides with a ciphertext point")
            circles.append(P.circle_through(c, *ks) if fallback else P.line_through(c, ks[0]))
        return KeyTriple(*circles)
