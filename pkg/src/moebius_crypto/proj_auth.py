"""Authentication codes in the projective plane PG(2, q).

Messages are the points of a fixed line L0, keys the points off L0, and
the tag of message m under key k is the line through m and k.  A tag is
accepted when it passes through the shared key point.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import (
    IdenticalPoints,
    KeyOnL0,
    MessageNotOnL0,
    TagIsL0,
    TooLarge,
    WrongCharacteristic,
)
from .field import FieldCtx, field_make, prime_power

Triple = tuple[int, int, int]

EXHAUSTIVE_Q = 8


class ProjectivePlane:
    """PG(2, F) with points and lines as normalized coordinate triples."""

    def __init__(self, F: FieldCtx):
        self.F = F
        self.q = F.q

    @classmethod
    def of_order(cls, q: int) -> "ProjectivePlane":
        return cls(field_make(*prime_power(q)))

    def normalize(self, v: Sequence[int]) -> Triple:
        F = self.F
        lead = next((c for c in v if c), 0)
        if lead == 0:
            raise ValueError("the zero vector is not a projective point")
        if lead == 1:
            return tuple(v)  # type: ignore[return-value]
        inv = F.inv(lead)
        return tuple(F.mul(inv, c) for c in v)  # type: ignore[return-value]

    def points(self) -> list[Triple]:
        q = self.q
        pts = [(1, b, c) for b in range(q) for c in range(q)]
        pts += [(0, 1, c) for c in range(q)]
        return pts + [(0, 0, 1)]

    # lines use the same normalized triples in dual coordinates
    lines = points

    def cross(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, int, int]:
        F = self.F
        m, s = F.mul, F.sub
        return (
            s(m(u[1], v[2]), m(u[2], v[1])),
            s(m(u[2], v[0]), m(u[0], v[2])),
            s(m(u[0], v[1]), m(u[1], v[0])),
        )

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        F = self.F
        return F.add(F.add(F.mul(u[0], v[0]), F.mul(u[1], v[1])), F.mul(u[2], v[2]))

    def incident(self, p: Sequence[int], L: Sequence[int]) -> bool:
        return self.dot(p, L) == 0

    def pline_through(self, p1: Sequence[int], p2: Sequence[int]) -> Triple:
        a, b = self.normalize(p1), self.normalize(p2)
        if a == b:
            raise IdenticalPoints("a line needs two distinct points")
        return self.normalize(self.cross(a, b))

    def meet(self, L1: Sequence[int], L2: Sequence[int]) -> Triple:
        a, b = self.normalize(L1), self.normalize(L2)
        if a == b:
            raise IdenticalPoints("identical lines have no single meet")
        return self.normalize(self.cross(a, b))

    def points_on(self, L: Sequence[int]) -> list[Triple]:
        return [p for p in self.points() if self.incident(p, L)]


class AuthContext:
    """The authentication scheme attached to a distinguished line L0."""

    def __init__(self, plane: ProjectivePlane, L0: Sequence[int] = (0, 0, 1)):
        self.plane = plane
        self.q = plane.q
        self.L0 = plane.normalize(L0)

    @classmethod
    def of_order(cls, q: int, L0: Sequence[int] = (0, 0, 1)) -> "AuthContext":
        return cls(ProjectivePlane.of_order(q), L0)

    def messages(self) -> list[Triple]:
        return self.plane.points_on(self.L0)

    def keys(self) -> list[Triple]:
        return [p for p in self.plane.points() if not self.plane.incident(p, self.L0)]

    def tags(self) -> list[Triple]:
        return [L for L in self.plane.lines() if L != self.L0]

    def authenticate(self, m: Sequence[int], k: Sequence[int]) -> Triple:
        P = self.plane
        if not P.incident(m, self.L0):
            raise MessageNotOnL0(f"{tuple(m)} is not a message point")
        if P.incident(k, self.L0):
            raise KeyOnL0(f"{tuple(k)} lies on L0")
        return P.pline_through(m, k)

    def verify(self, C: Sequence[int], k: Sequence[int]) -> bool:
        C = self.plane.normalize(C)
        if C == self.L0:
            raise TagIsL0("L0 is not a tag")
        if self.plane.incident(k, self.L0):
            raise KeyOnL0(f"{tuple(k)} lies on L0")
        return self.plane.incident(k, C)

    def message_of(self, C: Sequence[int]) -> Triple:
        """The message a tag carries: its meet with L0."""
        return self.plane.meet(C, self.L0)


@dataclass(frozen=True)
class ForgeryReport:
    q: int
    n0: int
    impersonation: Fraction
    substitution: Fraction
    consistent_keys: int
    sqrt_n0: int
    perfect: bool

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "n0": self.n0,
            "impersonation": str(self.impersonation),
            "substitution": str(self.substitution),
            "consistent_keys": self.consistent_keys,
            "sqrt_n0": self.sqrt_n0,
            "perfect": self.perfect,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        row = self.to_dict()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
        return buf.getvalue()


def forgery_stats(ctx: AuthContext) -> ForgeryReport:
    """Exact best-attack success rates by enumerating keys and tags.

    Impersonation: the forger sends the tag that is valid for the most keys.
    Substitution: having seen (m0, C0), the forger sends a tag for another
    message, and the key is uniform over the q keys consistent with C0.
    """
    if ctx.q > EXHAUSTIVE_Q:
        raise TooLarge(f"forgery statistics are exhaustive only for q <= {EXHAUSTIVE_Q}")
    P = ctx.plane
    keys = ctx.keys()
    tags = ctx.tags()
    on_tag = {C: frozenset(k for k in keys if P.incident(k, C)) for C in tags}
    counts = {len(s) for s in on_tag.values()}
    impersonation = Fraction(max(counts), len(keys))
    substitution = Fraction(0)
    for C0 in tags:
        m0 = ctx.message_of(C0)
        for C in tags:
            if C == C0 or ctx.message_of(C) == m0:
                continue
            substitution = max(substitution, Fraction(len(on_tag[C0] & on_tag[C]), len(on_tag[C0])))
    n0 = len(keys)
    root = round(n0 ** 0.5)
    sqrt_n0 = root if root * root == n0 else -1
    return ForgeryReport(
        q=ctx.q,
        n0=n0,
        impersonation=impersonation,
        substitution=substitution,
        consistent_keys=min(counts),
        sqrt_n0=sqrt_n0,
        perfect=len(counts) == 1 and min(counts) == sqrt_n0,
    )


def cartesian_report(ctx: AuthContext) -> dict[str, bool]:
    """Which Cartesian-scheme properties the construction has.

    ``injective``: each key sends distinct messages to distinct tags.
    ``key_images_disjoint``: the literal condition that different keys have
    disjoint tag images; it fails, since q keys lie on every tag.
    ``message_images_disjoint``: different messages never share a tag.
    ``covering``: every line other than L0 occurs as a tag.
    """
    msgs, keys = ctx.messages(), ctx.keys()
    image = {k: [ctx.authenticate(m, k) for m in msgs] for k in keys}
    by_msg = {m: {ctx.authenticate(m, k) for k in keys} for m in msgs}
    key_sets = [frozenset(v) for v in image.values()]
    union = set().union(*key_sets)
    return {
        "injective": all(len(set(v)) == len(v) for v in image.values()),
        "key_images_disjoint": all(
            not (a & b) for i, a in enumerate(key_sets) for b in key_sets[i + 1 :]
        ),
        "message_images_disjoint": all(
            not (by_msg[a] & by_msg[b]) for i, a in enumerate(msgs) for b in msgs[i + 1 :]
        ),
        "covering": union == set(ctx.tags()),
    }


# -- completeness in characteristic 2 -------------------------------------------
@dataclass(frozen=True)
class AuthWitness:
    i: int
    j: int
    x1: int
    k1: int
    k2: int
    s: int
    t: int
    u: int
    u_shift: int

    def row(self) -> list[int]:
        return [self.i, self.j, self.x1, self.k1, self.k2, self.s, self.t, self.u, self.u_shift]


CSV_HEADER = ["i", "j", "x1", "k1", "k2", "s", "t", "u", "u'"]


def tag_parameter(F: FieldCtx, x1: int, k1: int, k2: int, s: int, t: int) -> int:
    """u = (s*x1 + t - k2) / (x1 - k1)."""
    return F.div(F.sub(F.add(F.mul(s, x1), t), k2), F.sub(x1, k1))


def _u_from_authentication(x1: int, k1: int, k2: int, s: int, t: int, F: FieldCtx) -> int:
    # run the real scheme with L0 : s*x1 - x2 + t = 0 and read u off the tag
    ctx = AuthContext(ProjectivePlane(F), (s, F.neg(1), t))
    m = (x1, F.add(F.mul(s, x1), t), 1)
    C = ctx.authenticate(m, (k1, k2, 1))
    if not ctx.verify(C, (k1, k2, 1)):
        raise AssertionError("tag fails verification under its own key")
    a, b, _ = C
    if b == 0:
        raise ValueError("tag is vertical; no slope parameter")
    return F.neg(F.div(a, b))


def auth_completeness_matrix(n: int, F: FieldCtx | None = None) -> tuple[list[list[bool]], list[AuthWitness]]:
    """Entry (i, j): flipping bit i of x1 can flip exactly bit j of u.

    A witness fixes the message line (s, t), the key (k1, k2) and x1 with
    u(x1 + e_i) = u(x1) + e_j.  Both tags are recomputed through
    ``authenticate`` before the witness is accepted.
    """
    F = F or field_make(2, n)
    if F.p != 2:
        raise WrongCharacteristic("the bit-flip model needs characteristic 2")
    q = F.q
    matrix = [[False] * n for _ in range(n)]
    witnesses = []
    for i, j in product(range(n), repeat=2):
        ei, ej = 1 << i, 1 << j
        w = _find_auth_witness(F, ei, ej, q)
        if w is None:
            continue
        x1, k1, k2, s, t = w
        u = _u_from_authentication(x1, k1, k2, s, t, F)
        u2 = _u_from_authentication(x1 ^ ei, k1, k2, s, t, F)
        if u2 == u ^ ej:
            matrix[i][j] = True
            witnesses.append(AuthWitness(i + 1, j + 1, x1, k1, k2, s, t, u, u2))
    return matrix, witnesses


def _find_auth_witness(F: FieldCtx, ei: int, ej: int, q: int):
    for s, t, k1, k2 in product(range(q), repeat=4):
        for x1 in range(q):
            if x1 == k1 or x1 ^ ei == k1:
                continue
            u = tag_parameter(F, x1, k1, k2, s, t)
            if tag_parameter(F, x1 ^ ei, k1, k2, s, t) == u ^ ej:
                return x1, k1, k2, s, t
    return None


def witnesses_csv(witnesses: Sequence[AuthWitness]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for wt in witnesses:
        w.writerow(wt.row())
    return buf.getvalue()
