"""Projection-phase cost oracle for variable-ordering comparison.

Eliminating a variable from a polynomial set produces the coefficients,
discriminants, and pairwise resultants of the inputs with respect to that
variable.  Repeating the step down an elimination ordering yields a tower of
projection sets whose size is a cheap, deterministic stand-in for the cost of
a full decomposition.  The metric recorded per ordering is the sum of total
degrees (sotd) of all produced polynomials, with the polynomial count as a
tie-break.

All determinants are computed exactly: fraction-free (Bareiss) elimination
over polynomial entries, cross-checked in the tests against naive cofactor
expansion.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .polysys import Polynomial, PolySystem, label_to_ordering, n_labels

MAX_RANK_VARS = 5


@dataclass(frozen=True)
class LevelCost:
    """Size of one projection level: polynomial count and summed total degree."""

    num_polys: int
    sotd: int


@dataclass(frozen=True)
class CostReport:
    """Per-level and aggregate projection cost for one elimination ordering."""

    per_level: tuple[LevelCost, ...]
    total_polys: int
    total_sotd: int

    def __post_init__(self):
        object.__setattr__(self, "per_level", tuple(self.per_level))
        assert self.total_polys == sum(lv.num_polys for lv in self.per_level)
        assert self.total_sotd == sum(lv.sotd for lv in self.per_level)

    @classmethod
    def from_levels(cls, levels: Iterable[LevelCost]) -> "CostReport":
        levels = tuple(levels)
        return cls(
            per_level=levels,
            total_polys=sum(lv.num_polys for lv in levels),
            total_sotd=sum(lv.sotd for lv in levels),
        )

    def to_json_dict(self) -> dict:
        return {
            "per_level": [{"num_polys": lv.num_polys, "sotd": lv.sotd} for lv in self.per_level],
            "total_polys": self.total_polys,
            "total_sotd": self.total_sotd,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CostReport":
        return cls(
            per_level=tuple(LevelCost(lv["num_polys"], lv["sotd"]) for lv in d["per_level"]),
            total_polys=d["total_polys"],
            total_sotd=d["total_sotd"],
        )


@dataclass(frozen=True)
class OrderingCostTable:
    """All n! cost reports for a system plus the cheapest ordering.

    argmin_label minimizes (total_sotd, total_polys), lowest label on ties;
    tie is set when at least two orderings share that minimal cost pair.
    """

    costs: tuple[CostReport, ...]
    argmin_label: int
    tie: bool


# -- exact determinants -------------------------------------------------------
#
# Bareiss elimination spends nearly all its time in polynomial ring ops, so the
# inner loop works on dicts keyed by exponent vectors packed into single ints
# (24 bits per variable): a monomial product is then one integer addition.
# Canonical Polynomial values appear only at the boundaries.

_PACK_BITS = 24
_PACK_MASK = (1 << _PACK_BITS) - 1

_PackedDict = dict[int, int | Fraction]


def _pack(mono: tuple[int, ...]) -> int:
    key = 0
    for e in mono:
        key = (key << _PACK_BITS) | e
    return key


def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & _PACK_MASK
        key >>= _PACK_BITS
    return tuple(out)


def _c_div(a, b):
    """Exact coefficient division, staying on ints whenever possible."""
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
        return Fraction(a, b)
    q = Fraction(a) / Fraction(b)
    return int(q) if q.denominator == 1 else q


def _d_mul(a: _PackedDict, b: _PackedDict) -> _PackedDict:
    if len(a) > len(b):
        a, b = b, a
    out: _PackedDict = {}
    get = out.get
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = m1 + m2
            acc = get(m, 0) + c1 * c2
            if acc:
                out[m] = acc
            else:
                del out[m]
    return out


def _d_exact_div(num: _PackedDict, den: _PackedDict, nvars: int) -> _PackedDict:
    """Divide num by den, which must divide exactly; used by Bareiss pivoting.

    The working monomial order is plain lex on the packed keys, which is a
    valid monomial order, so leading-term cancellation terminates.
    """
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    if not num:
        return {}
    if len(den) == 1:
        ((dm, dc),) = den.items()
        if dm == 0:
            return {m: _c_div(c, dc) for m, c in num.items()}
    dm = max(den)
    dc = den[dm]
    dm_limbs = _unpack(dm, nvars)
    rem = dict(num)
    quotient: _PackedDict = {}
    while rem:
        rm = max(rem)
        if any(a < b for a, b in zip(_unpack(rm, nvars), dm_limbs)):
            raise ValueError("polynomial division is not exact")
        qm = rm - dm
        qc = _c_div(rem[rm], dc)
        quotient[qm] = quotient.get(qm, 0) + qc
        get = rem.get
        for m2, c2 in den.items():
            m = qm + m2
            acc = get(m, 0) - qc * c2
            if acc:
                rem[m] = acc
            else:
                del rem[m]
    return quotient


def det_bareiss(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a square polynomial matrix by fraction-free elimination.

    Divisions by the previous pivot are exact over the polynomial ring, so
    intermediate entries stay polynomial instead of growing into rational
    functions.  Row swaps handle zero pivots; an unsalvageable zero column
    short-circuits to the zero determinant.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = matrix[0][0].nvars
    m: list[list[_PackedDict]] = [
        [{_pack(mono): c for mono, c in p.terms} for p in row] for row in matrix
    ]
    if any(len(row) != n for row in m):
        raise ValueError("matrix is not square")
    sign = 1
    prev: _PackedDict = {0: 1}
    for r in range(n - 1):
        if not m[r][r]:
            for i in range(r + 1, n):
                if m[i][r]:
                    m[r], m[i] = m[i], m[r]
                    sign = -sign
                    break
            else:
                return Polynomial(nvars)
        pivot = m[r][r]
        for i in range(r + 1, n):
            row_i = m[i]
            head = row_i[r]
            for j in range(r + 1, n):
                acc = _d_mul(pivot, row_i[j])
                if head:
                    get = acc.get
                    for mono, c in _d_mul(head, m[r][j]).items():
                        val = get(mono, 0) - c
                        if val:
                            acc[mono] = val
                        else:
                            del acc[mono]
                row_i[j] = _d_exact_div(acc, prev, nvars)
            row_i[r] = {}
        prev = pivot
    det = m[n - 1][n - 1]
    if sign < 0:
        det = {mono: -c for mono, c in det.items()}
    return Polynomial(nvars, {_unpack(k, nvars): c for k, c in det.items()})


def det_cofactor(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant by first-row cofactor expansion; the slow cross-check route."""
    n = len(matrix)
    nvars = matrix[0][0].nvars
    if n == 1:
        return matrix[0][0]
    acc = Polynomial(nvars)
    for j in range(n):
        if matrix[0][j].is_zero():
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in matrix[1:]]
        term = matrix[0][j] * det_cofactor(minor)
        acc = acc - term if j % 2 else acc + term
    return acc


# -- resultants and projection -------------------------------------------------


def sylvester_matrix(p: Polynomial, q: Polynomial, v: int) -> list[list[Polynomial]]:
    """Sylvester matrix of p and q with respect to variable v (0-based).

    Rows hold the coefficient sequences of p (deg q rows) then q (deg p rows),
    each shifted right by its row offset; coefficients are stored highest
    degree first.
    """
    dp = p.degree_in(v)
    dq = q.degree_in(v)
    if dp < 1 or dq < 1:
        raise ValueError("both polynomials must have positive degree in the variable")
    nvars = p.nvars
    zero = Polynomial(nvars)
    pc = list(reversed(p.coeffs_in(v)))  # degree dp first
    qc = list(reversed(q.coeffs_in(v)))
    size = dp + dq
    rows = []
    for off in range(dq):
        rows.append([zero] * off + pc + [zero] * (size - off - len(pc)))
    for off in range(dp):
        rows.append([zero] * off + qc + [zero] * (size - off - len(qc)))
    return rows


def resultant(p: Polynomial, q: Polynomial, v: int) -> Polynomial:
    """Resultant of p and q with respect to variable v, computed exactly."""
    return det_bareiss(sylvester_matrix(p, q, v))


def discriminant(p: Polynomial, v: int) -> Polynomial:
    """Resultant of p and its v-derivative, kept raw (no content or sign fixup).

    Only degree statistics of the output feed the cost metric, so the usual
    leading-coefficient division is deliberately skipped.
    """
    if p.degree_in(v) < 2:
        raise ValueError("discriminant requires degree >= 2 in the variable")
    return resultant(p, p.derivative(v), v)


def projection_step(polys: Iterable[Polynomial], v: int) -> tuple[Polynomial, ...]:
    """Eliminate variable v from a polynomial set.

    Produces the union of (a) every coefficient of each input viewed as
    univariate in v (a degree-0 input passes through as its own coefficient),
    (b) discriminants of inputs with degree >= 2 in v, and (c) pairwise
    resultants of inputs with positive degree in v.  Constants and zeros are
    dropped; survivors are reduced to primitive parts with positive leading
    coefficient and deduplicated.  Returned in canonical sorted order.
    """
    polys = list(polys)
    if not polys:
        raise ValueError("projection_step requires a non-empty input")
    produced: list[Polynomial] = []
    positive_deg = []
    for p in polys:
        if p.degree_in(v) == 0:
            produced.append(p)
        else:
            produced.extend(p.coeffs_in(v))
            positive_deg.append(p)
        if p.degree_in(v) >= 2:
            produced.append(discriminant(p, v))
    for i in range(len(positive_deg)):
        for j in range(i + 1, len(positive_deg)):
            produced.append(resultant(positive_deg[i], positive_deg[j], v))
    survivors = {
        q.primitive_part() for q in produced if not q.is_zero() and not q.is_constant()
    }
    return tuple(sorted(survivors, key=Polynomial.sort_key))


def projection_cost(system: PolySystem, label: int) -> CostReport:
    """Project down the elimination ordering named by label, recording level sizes.

    The first variable of the ordering is eliminated first; the final variable
    needs no projection, so a system over n variables yields n-1 levels and a
    univariate system yields an empty report.
    """
    ordering = label_to_ordering(label, system.nvars)
    current: Sequence[Polynomial] = system.polys
    levels = []
    for v in ordering[:-1]:
        current = projection_step(current, v)
        levels.append(
            LevelCost(num_polys=len(current), sotd=sum(p.total_degree() for p in current))
        )
        if not current:
            levels.extend([LevelCost(0, 0)] * (len(ordering) - 1 - len(levels)))
            break
    return CostReport.from_levels(levels)


def rank_orderings(system: PolySystem) -> OrderingCostTable:
    """Cost every elimination ordering and select the cheapest.

    Orderings sharing an elimination prefix share projection work through a
    prefix cache.  Capped at 5 variables: the ordering count is factorial and
    projection growth is doubly exponential.
    """
    n = system.nvars
    if n > MAX_RANK_VARS:
        raise ValueError(f"rank_orderings supports at most {MAX_RANK_VARS} variables")
    prefix_cache: dict[tuple[int, ...], tuple[Polynomial, ...]] = {(): system.polys}

    def project_prefix(prefix: tuple[int, ...]) -> tuple[Polynomial, ...]:
        cached = prefix_cache.get(prefix)
        if cached is None:
            parent = project_prefix(prefix[:-1])
            cached = projection_step(parent, prefix[-1]) if parent else ()
            prefix_cache[prefix] = cached
        return cached

    costs = []
    for label in range(n_labels(n)):
        ordering = label_to_ordering(label, n)
        levels = []
        for k in range(1, n):
            polys = project_prefix(ordering[:k])
            levels.append(LevelCost(len(polys), sum(p.total_degree() for p in polys)))
        costs.append(CostReport.from_levels(levels))
    costs = tuple(costs)
    keys = [(c.total_sotd, c.total_polys) for c in costs]
    best = min(keys)
    argmin = keys.index(best)
    tie = keys.count(best) >= 2
    return OrderingCostTable(costs=costs, argmin_label=argmin, tie=tie)
