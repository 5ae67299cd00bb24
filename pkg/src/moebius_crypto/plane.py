"""The Möbius (inversive) plane over a quadratic extension G/F.

Points are elements of G (int codes) plus the sentinel ``INF``.  A circle is
the zero set of the Hermitian form

    alpha*z*conj(z) + conj(beta)*z + beta*conj(z) + gamma,   alpha, gamma in F,

together with ``INF`` exactly when ``alpha == 0`` (those circles are the
lines).  Coefficient triples are kept in a canonical scaling so that equal
point sets compare equal.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Union

from .errors import (
    CircleThroughInfinity,
    DegenerateCircle,
    DegeneratePoints,
    IdenticalCircles,
    PointNotOnCircle,
    PointOnCircle,
    SingularMap,
    TooLarge,
)
from .field import ENUMERATION_LIMIT, ExtCtx, extension_for, field_make, ext_make


class Infinity:
    """The single point at infinity closing G to a Möbius plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()
Point = Union[int, Infinity]


@dataclass(frozen=True)
class Circle:
    alpha: int
    beta: int
    gamma: int

    @property
    def is_line(self) -> bool:
        return self.alpha == 0


@dataclass(frozen=True)
class PlaneAudit:
    q: int
    point_count: int
    circle_count: int
    points_per_circle: int | None
    circles_through_point: int | None
    circles_through_pair: int | None
    tangents_at_point: int | None

    @staticmethod
    def expected(q: int) -> dict:
        return {
            "point_count": q * q + 1,
            "circle_count": q * (q * q + 1),
            "points_per_circle": q + 1,
            "circles_through_point": q * q + q,
            "circles_through_pair": q + 1,
            "tangents_at_point": q,
        }

    def mismatches(self) -> dict:
        got = dataclasses.asdict(self)
        return {k: (got[k], v) for k, v in self.expected(self.q).items() if got[k] != v}

    @property
    def matches(self) -> bool:
        return not self.mismatches()

    def to_json(self) -> str:
        return json.dumps({**dataclasses.asdict(self), "matches": self.matches}, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        row = dataclasses.asdict(self)
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buf.getvalue()


def _uniform(values: Iterable[int]) -> int | None:
    seen = set(values)
    return seen.pop() if len(seen) == 1 else None


class MoebiusPlane:
    """Incidence geometry of circles over an extension context."""

    def __init__(self, ext: ExtCtx):
        self.ext = ext
        self.F = ext.base
        self.q = ext.q

    @classmethod
    def over(cls, p: int, n: int = 1) -> "MoebiusPlane":
        return cls(ext_make(field_make(p, n)))

    @classmethod
    def of_order(cls, q: int) -> "MoebiusPlane":
        return cls(extension_for(q))

    def __repr__(self) -> str:
        return f"MoebiusPlane({self.ext!r})"

    # -- points ------------------------------------------------------------
    def points(self) -> list[Point]:
        return self.ext.elements() + [INF]

    def finite_points(self) -> list[int]:
        return self.ext.elements()

    # -- circles -----------------------------------------------------------
    def canonical(self, alpha: int, beta: int, gamma: int) -> Circle:
        F, q = self.F, self.q
        lead = next((c for c in (alpha, beta % q, beta // q, gamma) if c), 0)
        if lead == 0:
            raise DegenerateCircle("all coefficients are zero")
        if lead != 1:
            lam = F.inv(lead)
            alpha, beta, gamma = F.mul(lam, alpha), self.ext.scale(lam, beta), F.mul(lam, gamma)
        return Circle(alpha, beta, gamma)

    def discriminant(self, C: Circle) -> int:
        return self.F.sub(self.ext.norm(C.beta), self.F.mul(C.alpha, C.gamma))

    def circle(self, alpha: int, beta: int, gamma: int) -> Circle:
        """Canonical circle from coefficients; rejects degenerate forms."""
        C = self.canonical(alpha, beta, gamma)
        if self.discriminant(C) == 0:
            raise DegenerateCircle(f"{C} has zero discriminant")
        return C

    def unit_circle(self) -> Circle:
        return self.circle(1, 0, self.F.neg(1))

    def value(self, C: Circle, z: int) -> int:
        """alpha*N(z) + Tr(conj(beta)*z) + gamma; always an element of F."""
        G, F = self.ext, self.F
        v = G.trace(G.mul(G.conjugate(C.beta), z))
        if C.alpha:
            v = F.add(v, F.mul(C.alpha, G.norm(z)))
        return F.add(v, C.gamma)

    def contains(self, C: Circle, p: Point) -> bool:
        if p is INF:
            return C.alpha == 0
        return self.value(C, p) == 0

    def _row(self, z: Point) -> list[int]:
        G = self.ext
        if z is INF:
            return [1, 0, 0, 0]
        return [G.norm(z), G.trace(z), G.trace(G.mul(G.conjugate(G.omega), z)), 1]

    def circle_through(self, a: Point, b: Point, c: Point) -> Circle:
        """The unique circle through three pairwise distinct points."""
        if a == b or b == c or a == c:
            raise DegeneratePoints("points must be pairwise distinct")
        alpha, b0, b1, gamma = _null_vector(self.F, [self._row(a), self._row(b), self._row(c)])
        return self.canonical(alpha, self.ext.make(b0, b1), gamma)

    def line_through(self, p: Point, k: Point) -> Circle:
        if p is INF or k is INF:
            raise DegeneratePoints("line_through takes two finite points")
        if p == k:
            raise DegeneratePoints("points must be distinct")
        # conj(beta) * (k - p) must be trace-free, i.e. a multiple of trace_zero
        G = self.ext
        beta = G.conjugate(G.div(G.trace_zero, G.sub(k, p)))
        gamma = self.F.neg(G.trace(G.mul(G.conjugate(beta), p)))
        return self.canonical(0, beta, gamma)

    def points_of(self, C: Circle) -> list[Point]:
        if self.ext.order > ENUMERATION_LIMIT:
            raise TooLarge("circle enumeration needs q^2 <= 2^24")
        pts: list[Point] = [z for z in self.ext.elements() if self.value(C, z) == 0]
        if C.alpha == 0:
            pts.append(INF)
        return pts

    def circles(self) -> list[Circle]:
        """Every circle of the plane, each in canonical form."""
        G, F, q = self.ext, self.F, self.q
        if G.order * q > ENUMERATION_LIMIT:
            raise TooLarge("circle enumeration too large")
        out = []
        for beta in G.elements():
            nb = G.norm(beta)
            out.extend(Circle(1, beta, gamma) for gamma in F.elements() if gamma != nb)
        for beta in [1 + q * im for im in range(q)] + [q]:
            out.extend(Circle(0, beta, gamma) for gamma in F.elements())
        return out

    # -- double ratios and fractional linear maps ---------------------------
    def double_ratio(self, a: Point, b: Point, c: Point, z: Point) -> Point:
        """((a-c)/(a-z)) / ((b-c)/(b-z)) with limits at INF."""
        if a == b or b == c or a == c:
            raise DegeneratePoints("a, b, c must be pairwise distinct")
        if z == a:
            return INF
        if z == b:
            return 0
        if z == c:
            return 1
        G = self.ext

        def diff(x: Point, y: Point) -> int:
            # a factor involving INF cancels against its partner
            return 1 if x is INF or y is INF else G.sub(x, y)

        num = G.mul(diff(a, c), diff(b, z))
        den = G.mul(diff(a, z), diff(b, c))
        return G.div(num, den)

    def ratio_on_circle(self, a: Point, b: Point, c: Point, z: Point) -> bool:
        r = self.double_ratio(a, b, c, z)
        return r is INF or self.ext.is_base(r)

    def apply_mobius(self, coeffs: tuple[int, int, int, int], z: Point) -> Point:
        G = self.ext
        a, b, c, d = coeffs
        if z is INF:
            return INF if c == 0 else G.div(a, c)
        den = G.add(G.mul(c, z), d)
        if den == 0:
            return INF
        return G.div(G.add(G.mul(a, z), b), den)

    def mobius_image(self, a: int, b: int, c: int, d: int) -> Circle:
        """Image of F ∪ {INF} under z -> (az+b)/(cz+d)."""
        G = self.ext
        if G.sub(G.mul(a, d), G.mul(b, c)) == 0:
            raise SingularMap("ad - bc = 0")
        m = (a, b, c, d)
        return self.circle_through(self.apply_mobius(m, 0), self.apply_mobius(m, 1), self.apply_mobius(m, INF))

    def _inversion(self, a: int, z: Point) -> Point:
        """z -> 1/(z - a)."""
        if z is INF:
            return 0
        if z == a:
            return INF
        return self.ext.inv(self.ext.sub(z, a))

    def _inversion_back(self, a: int, w: Point) -> Point:
        if w is INF:
            return a
        if w == 0:
            return INF
        return self.ext.add(a, self.ext.inv(w))

    def invert_circle(self, C: Circle, a: int) -> Circle:
        """Image of C under z -> 1/(z - a), computed on coefficients."""
        G = self.ext
        beta = G.add(G.scale(C.alpha, G.conjugate(a)), G.conjugate(C.beta))
        return self.canonical(self.value(C, a), beta, C.alpha)

    # -- intersections -----------------------------------------------------
    def _line_param(self, L: Circle) -> tuple[int, int]:
        """A point z0 and direction d with L = {z0 + t*d : t in F} ∪ {INF}."""
        G, F = self.ext, self.F
        if L.gamma == 0:
            z0 = 0
        else:
            u0 = G.trace_unit
            u = G.scale(F.div(F.neg(L.gamma), G.trace(u0)), u0)
            z0 = G.div(u, G.conjugate(L.beta))
        return z0, G.mul(L.beta, G.trace_zero)

    def _meet_line(self, L: Circle, C: Circle) -> set[Point]:
        """Finite points of line L on the circle C (C with alpha != 0)."""
        G, F = self.ext, self.F
        z0, d = self._line_param(L)
        A = F.mul(C.alpha, G.norm(d))
        B = F.add(F.mul(C.alpha, G.trace(G.mul(z0, G.conjugate(d)))), G.trace(G.mul(G.conjugate(C.beta), d)))
        roots = F.quadratic_roots(A, B, self.value(C, z0))
        return {G.add(z0, G.scale(t, d)) for t in roots}

    def intersect(self, C1: Circle, C2: Circle) -> set[Point]:
        """Exact intersection of two distinct circles (0, 1 or 2 points)."""
        if C1 == C2:
            raise IdenticalCircles("circles coincide")
        G, F = self.ext, self.F
        if C1.is_line and C2.is_line:
            z0, d = self._line_param(C1)
            slope = G.trace(G.mul(G.conjugate(C2.beta), d))
            if slope == 0:
                return {INF}
            t = F.div(F.neg(self.value(C2, z0)), slope)
            return {G.add(z0, G.scale(t, d)), INF}
        if C1.is_line:
            return self._meet_line(C1, C2)
        if C2.is_line:
            return self._meet_line(C2, C1)
        # both canonical with alpha = 1; their difference is the radical axis
        if C1.beta == C2.beta:
            return set()
        axis = self.canonical(0, G.sub(C1.beta, C2.beta), F.sub(C1.gamma, C2.gamma))
        return self._meet_line(axis, C1)

    def second_intersection(self, A: Circle, B: Circle, p: Point) -> Point:
        """The common point of A and B other than p, or p itself if they touch.

        p must lie on both circles.  Inverting at p turns A and B into lines,
        so only a linear solve is needed.
        """
        if A == B:
            raise IdenticalCircles("circles coincide")
        if p is not INF and A.is_line != B.is_line:
            L, C = (A, B) if A.is_line else (B, A)
            if not (self.contains(L, p) and self.contains(C, p)):
                raise PointNotOnCircle(f"{p} is not on both circles")
            return self.chord_point(C, p, self.ext.mul(L.beta, self.ext.trace_zero))
        if p is INF:
            if not (A.is_line and B.is_line):
                raise PointNotOnCircle("INF is not on both circles")
            return next((z for z in self.intersect(A, B) if z is not INF), INF)
        A_img, B_img = self.invert_circle(A, p), self.invert_circle(B, p)
        if A_img.alpha or B_img.alpha:
            raise PointNotOnCircle(f"{p} is not on both circles")
        G, F = self.ext, self.F
        z0, d = self._line_param(A_img)
        slope = G.trace(G.mul(G.conjugate(B_img.beta), d))
        if slope == 0:
            return p
        t = F.div(F.neg(self.value(B_img, z0)), slope)
        return self._inversion_back(p, G.add(z0, G.scale(t, d)))

    def chord_point(self, C: Circle, p: int, d: int) -> int:
        """Second point of C on the line {p + t*d}, for p on C and alpha != 0.

        Substituting z = p + t*d leaves t*(alpha*Tr(conj(p)*d) + Tr(conj(beta)*d))
        + t^2*alpha*N(d) = 0, so the other root is read off directly.
        """
        G, F = self.ext, self.F
        lin = G.trace(G.mul(G.conjugate(G.add(G.scale(C.alpha, p), C.beta)), d))
        if lin == 0:
            return p
        t = F.neg(F.div(lin, F.mul(C.alpha, G.norm(d))))
        return G.add(p, G.scale(t, d))

    def intersect_brute(self, C1: Circle, C2: Circle) -> set[Point]:
        return set(self.points_of(C1)) & set(self.points_of(C2))

    def tangent_circle(self, A: Circle, a: Point, b: Point) -> Circle:
        """The circle through a and b touching A only at a."""
        if not self.contains(A, a):
            raise PointNotOnCircle(f"{a} is not on {A}")
        if self.contains(A, b):
            raise PointOnCircle(f"{b} lies on {A}")
        G = self.ext
        if a is INF:
            # A is a line; tangency at INF is parallelism
            return self.canonical(0, A.beta, G.base.neg(G.trace(G.mul(G.conjugate(A.beta), b))))
        # send a to INF; A becomes a line, the answer its parallel through b'
        A_img = self.invert_circle(A, a)
        b_img = self._inversion(a, b)
        third = G.add(b_img, G.mul(A_img.beta, G.trace_zero))
        return self.circle_through(a, b, self._inversion_back(a, third))

    def tangent_line_at(self, M: Circle, p: Point) -> Circle:
        """The line (circle through INF) touching M only at p."""
        if M.is_line:
            raise CircleThroughInfinity("M already passes through INF")
        return self.tangent_circle(M, p, INF)

    # -- audits ------------------------------------------------------------
    def tangent_pencil(self, C: Circle, b: Point) -> list[Circle]:
        """C together with every circle meeting C in b alone.

        In the derivation at b these are the q parallel lines of one class,
        so the pencil has q members and q - 1 of them differ from C.
        """
        if not self.contains(C, b):
            raise PointNotOnCircle(f"{b} is not on {C}")
        others = {self.tangent_circle(C, b, x) for x in self.points() if not self.contains(C, x)}
        return [C] + sorted(others, key=dataclasses.astuple)

    def incidence(self) -> dict[Circle, frozenset]:
        return {C: frozenset(self.points_of(C)) for C in self.circles()}

    def audit(self, exhaustive_tangents: bool | None = None) -> PlaneAudit:
        """Count points, circles and incidences by enumeration.

        ``tangents_at_point`` is the size of the tangent pencil at a point of
        a circle, the circle itself included (see ``tangent_pencil``).
        """
        q = self.q
        if q > 16:
            raise TooLarge("plane audit is limited to q <= 16")
        if exhaustive_tangents is None:
            exhaustive_tangents = q <= 5
        inc = self.incidence()
        points = self.points()
        through: dict[Point, set[Circle]] = {p: set() for p in points}
        for C, pts in inc.items():
            for p in pts:
                through[p].add(C)
        pairs = combinations(points, 2)
        if q > 5:
            pairs = ((points[0], p) for p in points[1:])
        per_pair = _uniform(len(through[a] & through[b]) for a, b in pairs)
        circles = list(inc) if exhaustive_tangents else list(inc)[:3]
        tangents = _uniform(
            sum(1 for D in through[b] if D == C or len(inc[D] & inc[C]) == 1)
            for C in circles
            for b in inc[C]
        )
        return PlaneAudit(
            q=q,
            point_count=len(points),
            circle_count=len(set(inc.values())),
            points_per_circle=_uniform(len(s) for s in inc.values()),
            circles_through_point=_uniform(len(s) for s in through.values()),
            circles_through_pair=per_pair,
            tangents_at_point=tangents,
        )


def _null_vector(F, rows: list[list[int]]) -> list[int]:
    """Spanning vector of the (one-dimensional) null space of rows over F."""
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][col])
        m[r] = [F.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    if len(free) != 1:
        raise DegeneratePoints("points do not determine a unique circle")
    vec = [0] * ncols
    vec[free[0]] = 1
    for i, col in enumerate(pivots):
        vec[col] = F.neg(m[i][free[0]])
    return vec


def m3_witness(plane: MoebiusPlane) -> tuple[Point, Point, Point, Point]:
    """Four points on no common circle: 0, 1, INF lie on the closure of F."""
    return (0, 1, INF, plane.ext.omega)
