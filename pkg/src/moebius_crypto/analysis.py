"""Exhaustive cryptanalysis of the line-key Möbius cipher.

Everything here is exact: probabilities are ``Fraction`` counts obtained by
enumerating every admissible key point, then compared with closed forms.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .cipher import KeyTriple, MoebiusCipher
from .errors import MessageCircleThroughInfinity, TooLarge, WrongCharacteristic
from .field import FieldCtx, field_make
from .plane import INF, MoebiusPlane, Point

TABLE_Q_LIMIT = 32

# q^2 * max|mu - nu| over q in {5, 7, 8, 16, 32} peaks at 225/28 (q = 5) and
# tends to 3; frozen after the first exact sweep as a regression bound
PERFECTNESS_Q2_BOUND = Fraction(81, 10)


# -- closed forms ---------------------------------------------------------------
def apriori(q: int, position: int) -> Fraction:
    """mu(m_i): m_i is uniform over the points of M not yet used."""
    return Fraction(1, q + 2 - position)


def key_set_size(q: int, prefix: Sequence[bool]) -> int:
    """|K_i| given which earlier positions were fixed points (True = m_j = c_j)."""
    if not prefix:
        return q * q - q - 1
    if len(prefix) == 1:
        return q * q - 2 * q + 1 if prefix[0] else q * q - 3 * q + 3
    moved = sum(not e for e in prefix)
    return q * q - (3 + moved) * q + 3 + 2 * moved


def closed_form_nu(q: int, case: Sequence[bool]) -> Fraction:
    """The a-posteriori values exactly as tabulated for line keys."""
    pos = len(case)
    num = q - 1 if case[-1] else q - 2
    if pos == 2 and case[0] and case[1]:
        return Fraction(1, q - 1)
    return Fraction(num, key_set_size(q, case[:-1]))


def case_label(case: Sequence[bool]) -> str:
    return ",".join(f"m{i}{'=' if e else '!='}c{i}" for i, e in enumerate(case, 1))


def cases(position: int) -> list[tuple[bool, ...]]:
    return list(product((True, False), repeat=position))


# -- reports --------------------------------------------------------------------
@dataclass
class TableRow:
    position: int
    case: tuple[bool, ...]
    mu: Fraction
    nu: Fraction | None
    counted_numerator: int | None
    counted_denominator: int | None
    formula_value: Fraction
    realized: bool
    uniform: bool
    instances: int

    @property
    def label(self) -> str:
        return case_label(self.case)

    @property
    def match(self) -> bool:
        return self.realized and self.uniform and self.nu == self.formula_value

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "case": self.label,
            "mu": str(self.mu),
            "nu": None if self.nu is None else str(self.nu),
            "counted_numerator": self.counted_numerator,
            "counted_denominator": self.counted_denominator,
            "formula_value": str(self.formula_value),
            "realized": self.realized,
            "uniform": self.uniform,
            "instances": self.instances,
            "match": self.match,
            "mu_float": float(self.mu),
            "nu_float": None if self.nu is None else float(self.nu),
        }


@dataclass
class ProbabilityReport:
    q: int
    message: tuple[Point, Point, Point]
    rows: list[TableRow]
    mu_support: dict[int, int] = field(default_factory=dict)
    key_set_sizes: dict[str, list[int]] = field(default_factory=dict)

    def position(self, i: int) -> list[TableRow]:
        return [r for r in self.rows if r.position == i]

    def row(self, case: Sequence[bool]) -> TableRow:
        return next(r for r in self.rows if r.case == tuple(case))

    @property
    def all_match(self) -> bool:
        """Every realizable row equals its closed form."""
        return all(r.match for r in self.rows if r.realized)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "message": [str(z) for z in self.message],
            "mu_support": self.mu_support,
            "key_set_sizes": self.key_set_sizes,
            "rows": [r.to_dict() for r in self.rows],
            "all_match": self.all_match,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["position", "case", "mu", "nu", "counted_numerator", "counted_denominator",
                "formula_value", "realized", "match"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({**r.to_dict(), "q": self.q})
        return buf.getvalue()


def default_message(cipher: MoebiusCipher) -> tuple[Point, Point, Point]:
    pts = cipher.plane.points_of(cipher.plane.unit_circle())
    return pts[0], pts[1], pts[2]


def aposteriori_tables(q: int, message: Sequence[Point] | None = None) -> ProbabilityReport:
    """Count, for every case, the share of admissible keys yielding each c_i.

    Key sets follow the sequential rule: K_1 is every finite point off M,
    and K_i drops the keys that would send m_i onto an earlier m_j or c_j.
    Earlier ciphertext points range over every value consistent with the
    full key conditions (so c_1, c_2 never land on a later message point).
    """
    if q > TABLE_Q_LIMIT:
        raise TooLarge(f"tables are exhaustive only for q <= {TABLE_Q_LIMIT}")
    cipher = MoebiusCipher.of_order(q)
    P = cipher.plane
    msg = cipher.message(*(message or default_message(cipher)))
    if P.contains(msg.circle, INF):
        raise MessageCircleThroughInfinity("the tables assume INF off the message circle")
    m1, m2, m3 = msg.points
    keys = [k for k in P.finite_points() if not P.contains(msg.circle, k)]
    img = [{k: cipher.line_image(msg, i, k) for k in keys} for i in range(3)]

    obs: dict[tuple[bool, ...], list[tuple[int, int]]] = defaultdict(list)
    sizes: dict[str, set[int]] = defaultdict(set)

    def tally(i: int, excluded: set, prefix: tuple[bool, ...]) -> Counter:
        K = [k for k in keys if img[i][k] not in excluded]
        sizes[case_label(prefix) or "none"].add(len(K))
        counts = Counter(img[i][k] for k in K)
        for c, n in counts.items():
            obs[prefix + (c == msg.points[i],)].append((n, len(K)))
        return counts

    c1_counts = tally(0, set(), ())
    for c1 in c1_counts:
        if c1 in (m2, m3):
            continue
        p1 = (c1 == m1,)
        c2_counts = tally(1, {m1, c1}, p1)
        for c2 in c2_counts:
            if c2 in (m3,):
                continue
            tally(2, {m1, c1, m2, c2}, p1 + (c2 == m2,))

    rows = []
    for pos in (1, 2, 3):
        for case in cases(pos):
            seen = set(obs.get(case, []))
            realized = bool(seen)
            uniform = len(seen) == 1
            num, den = next(iter(seen)) if uniform else (None, None)
            rows.append(TableRow(
                position=pos,
                case=case,
                mu=apriori(q, pos),
                nu=Fraction(num, den) if uniform else None,
                counted_numerator=num,
                counted_denominator=den,
                formula_value=closed_form_nu(q, case),
                realized=realized,
                uniform=uniform,
                instances=len(obs.get(case, [])),
            ))
    return ProbabilityReport(
        q=q,
        message=msg.points,
        rows=rows,
        mu_support={1: q + 1, 2: q, 3: q - 1},
        key_set_sizes={k: sorted(v) for k, v in sizes.items()},
    )


@dataclass
class DeviationReport:
    q: int
    per_row: dict[str, Fraction]
    per_position: dict[int, Fraction]
    maximum: Fraction

    @property
    def scaled(self) -> Fraction:
        return self.maximum * self.q * self.q

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "per_row": {k: str(v) for k, v in self.per_row.items()},
            "per_position": {str(k): str(v) for k, v in self.per_position.items()},
            "max_deviation": str(self.maximum),
            "q2_times_max": str(self.scaled),
            "q2_times_max_float": float(self.scaled),
        }


def perfectness_deviation(q: int, report: ProbabilityReport | None = None) -> DeviationReport:
    """max |mu - nu| over the counted rows, per position and overall."""
    report = report or aposteriori_tables(q)
    per_row = {}
    per_pos: dict[int, Fraction] = {}
    for r in report.rows:
        if r.nu is None:
            continue
        d = abs(r.mu - r.nu)
        per_row[f"{r.position}:{r.label}"] = d
        per_pos[r.position] = max(per_pos.get(r.position, Fraction(0)), d)
    return DeviationReport(q, per_row, per_pos, max(per_row.values()))


def deviation_sweep(qs: Sequence[int]) -> list[DeviationReport]:
    return [perfectness_deviation(q) for q in qs]


# -- completeness ---------------------------------------------------------------
def unit_vector(F: FieldCtx, index: int) -> int:
    """e_i in F: the element with digit 1 at position i (1-based)."""
    return F.p ** (index - 1)


def position_unit(plane: MoebiusPlane, index: int) -> int:
    """Unit change at bit position ``index`` in 1..2n of a point p(x, y)."""
    n, G = plane.F.n, plane.ext
    if index <= n:
        return G.make(unit_vector(plane.F, index), 0)
    return G.make(0, unit_vector(plane.F, index - n))


def det(plane: MoebiusPlane, a: int, b: int) -> int:
    """x_a*y_b - x_b*y_a over F for points written in coordinates (x, y)."""
    F, G = plane.F, plane.ext
    (x, y), (u, v) = G.parts(a), G.parts(b)
    return F.sub(F.mul(x, v), F.mul(u, y))


@dataclass(frozen=True)
class AvalancheWitness:
    i: int
    j: int
    m: int
    c: int
    m_shift: int
    c_shift: int
    k: int
    message: tuple[int, int, int]
    message_shift: tuple[int, int, int]

    def row(self, q: int) -> list[int]:
        return [self.i, self.j, self.m % q, self.m // q, self.c % q, self.c // q,
                self.m_shift % q, self.m_shift // q, self.c_shift % q, self.c_shift // q, self.k]


AVALANCHE_CSV_HEADER = ["i", "j", "x", "y", "u", "v", "x'", "y'", "u'", "v'", "k"]


@dataclass
class AvalancheMatrix:
    n: int
    q: int
    entries: list[list[bool]]
    witnesses: dict[tuple[int, int], AvalancheWitness]

    @property
    def all_true(self) -> bool:
        return all(all(row) for row in self.entries)

    def grid(self) -> str:
        return "\n".join(" ".join("1" if e else "0" for e in row) for row in self.entries)

    def witness_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AVALANCHE_CSV_HEADER)
        for key in sorted(self.witnesses):
            w.writerow(self.witnesses[key].row(self.q))
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "matrix": [[int(e) for e in row] for row in self.entries],
            "all_true": self.all_true,
            "witnesses": [dict(zip(AVALANCHE_CSV_HEADER, self.witnesses[k].row(self.q)))
                          for k in sorted(self.witnesses)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _encrypt_first(cipher: MoebiusCipher, m: int, c: int, k: int) -> tuple[tuple[int, int, int], int] | None:
    """Encrypt a triple whose first point m is moved to c by the line through k.

    The message circle is chosen through m and c (tangent to the key line
    when c == m); the other positions use tangent keys so they stay fixed.
    """
    P = cipher.plane
    L = P.line_through(m, k)
    third = next((z for z in P.finite_points() if not P.contains(L, z)), None)
    if third is None:
        return None
    M = P.tangent_circle(L, m, third) if c == m else P.circle_through(m, c, third)
    rest = [z for z in P.points_of(M) if z not in (m, c, INF)]
    if len(rest) < 2 or P.contains(M, k):
        return None
    m2, m3 = rest[0], rest[1]
    msg = cipher.message(m, m2, m3)
    key = KeyTriple(L, P.tangent_line_at(M, m2), P.tangent_line_at(M, m3))
    ct = cipher.encrypt_triple(msg, key)
    return msg.points, ct.c1


def cipher_completeness_matrix(n: int, p: int = 2, exploratory: bool = False) -> AvalancheMatrix:
    """Avalanche matrix of one enciphered point under line keys.

    Entry (i, j) holds when there are points m, c collinear with
    k = 0 such that m + e_i and c + e_j are again collinear with k, and two
    real encryptions confirm that m -> c and m + e_i -> c + e_j under the
    line keys through k.  Characteristic 2 is required unless ``exploratory``.
    """
    if p != 2 and not exploratory:
        raise WrongCharacteristic("completeness is claimed for characteristic 2 only")
    F = field_make(p, n)
    cipher = MoebiusCipher.of_order(F.q)
    P, G = cipher.plane, cipher.plane.ext
    k = 0
    nonzero_F = range(1, F.q)
    pts = [z for z in P.finite_points() if z != k]
    size = 2 * n
    entries = [[False] * size for _ in range(size)]
    witnesses = {}
    for i, j in product(range(1, size + 1), repeat=2):
        ei, ej = position_unit(P, i), position_unit(P, j)
        for m, lam in product(pts, nonzero_F):
            c = G.scale(lam, m)
            m2, c2 = G.add(m, ei), G.add(c, ej)
            if m2 == k or c2 == k or det(P, m, c) or det(P, m2, c2):
                continue
            first = _encrypt_first(cipher, m, c, k)
            second = _encrypt_first(cipher, m2, c2, k)
            if first is None or second is None or first[1] != c or second[1] != c2:
                continue
            entries[i - 1][j - 1] = True
            witnesses[(i, j)] = AvalancheWitness(i, j, m, c, m2, c2, k, first[0], second[0])
            break
    return AvalancheMatrix(n, F.q, entries, witnesses)


def solve_cross_condition(F: FieldCtx, i: int, j: int) -> tuple[int, int, int, int] | None:
    """(x, y, u, v), m and c nonzero, with xv - uy = 0 and x*e_j + v*e_i + e_i*e_j = 0."""
    ei, ej = unit_vector(F, i), unit_vector(F, j)
    for x, y, u, v in product(range(F.q), repeat=4):
        if (x, y) == (0, 0) or (u, v) == (0, 0):
            continue
        if F.sub(F.mul(x, v), F.mul(u, y)):
            continue
        if F.add(F.add(F.mul(x, ej), F.mul(v, ei)), F.mul(ei, ej)) == 0:
            return x, y, u, v
    return None


def solve_same_condition(F: FieldCtx, i: int, j: int) -> tuple[int, int, int, int] | None:
    """(x, y, u, v), m and c nonzero, with xv - uy = 0 and e_j*y + v*e_i = 0."""
    ei, ej = unit_vector(F, i), unit_vector(F, j)
    for x, y, u, v in product(range(F.q), repeat=4):
        if (x, y) == (0, 0) or (u, v) == (0, 0):
            continue
        if F.sub(F.mul(x, v), F.mul(u, y)):
            continue
        if F.add(F.mul(ej, y), F.mul(v, ei)) == 0:
            return x, y, u, v
    return None
