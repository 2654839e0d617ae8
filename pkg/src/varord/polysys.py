"""Exact sparse multivariate polynomials, system parsing, and variable permutations.

Polynomials live in QQ[x1..xn] with coefficients kept as exact rationals
(plain ints where the value is integral, ``fractions.Fraction`` otherwise),
so downstream resultant computations never lose precision.  Every value here
is immutable and canonical on construction: terms are stored in graded
lexicographic descending order with zero coefficients dropped, which makes
equality, hashing and printing well defined.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

Coeff = int | Fraction
Monomial = tuple[int, ...]


class ParseError(ValueError):
    """Syntax or validity error in polynomial system text, with position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


def _norm_coeff(c: Coeff) -> Coeff:
    """Collapse integral Fractions to int so arithmetic stays on fast paths."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    if isinstance(c, int):
        return c
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def _grlex_key(mono: Monomial) -> tuple[int, Monomial]:
    return (sum(mono), mono)


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial over the rationals in ``nvars`` variables.

    ``terms`` maps exponent tuples to non-zero coefficients; the constructor
    accepts a mapping or pair iterable and canonicalizes (merge, drop zeros,
    sort graded-lex descending).  The zero polynomial has no terms.
    """

    nvars: int
    terms: tuple[tuple[Monomial, Coeff], ...] = ()

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be positive")
        items = self.terms.items() if isinstance(self.terms, Mapping) else self.terms
        merged: dict[Monomial, Coeff] = {}
        for mono, coeff in items:
            mono = tuple(mono)
            if len(mono) != self.nvars:
                raise ValueError(f"exponent vector {mono} has length != nvars={self.nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            acc = merged.get(mono, 0) + coeff
            if acc == 0:
                merged.pop(mono, None)
            else:
                merged[mono] = acc
        canon = tuple(
            (m, _norm_coeff(c))
            for m, c in sorted(merged.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)
        )
        object.__setattr__(self, "terms", canon)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m, _ in self.terms)

    def total_degree(self) -> int:
        """Max total degree over terms; 0 for constants and the zero polynomial."""
        return max((sum(m) for m, _ in self.terms), default=0)

    def degree_in(self, v: int) -> int:
        """Max exponent of variable ``v`` (0-based); 0 if absent."""
        if not 0 <= v < self.nvars:
            raise IndexError(f"variable index {v} out of range for nvars={self.nvars}")
        return max((m[v] for m, _ in self.terms), default=0)

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms[0][1] if self.terms else 0

    def sort_key(self):
        """Total-order key for deterministic sorting of polynomial sets."""
        return tuple((m, Fraction(c).numerator, Fraction(c).denominator) for m, c in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _require_same_ring(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, 0) + c
        return Polynomial(self.nvars, acc)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        acc: dict[Monomial, Coeff] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial(self.nvars, acc)

    def scale(self, c: Coeff) -> "Polynomial":
        if c == 0:
            return Polynomial(self.nvars)
        return Polynomial(self.nvars, tuple((m, k * c) for m, k in self.terms))

    def derivative(self, v: int) -> "Polynomial":
        """Partial derivative with respect to variable ``v`` (0-based)."""
        if not 0 <= v < self.nvars:
            raise IndexError(f"variable index {v} out of range")
        acc = {}
        for m, c in self.terms:
            if m[v] > 0:
                dm = m[:v] + (m[v] - 1,) + m[v + 1 :]
                acc[dm] = acc.get(dm, 0) + c * m[v]
        return Polynomial(self.nvars, acc)

    def coeffs_in(self, v: int) -> list["Polynomial"]:
        """Coefficients of self viewed as univariate in ``v``.

        Returns ``deg_v + 1`` polynomials, index k holding the coefficient of
        x_v^k with the exponent of v zeroed out.  Entry k may be zero.
        """
        d = self.degree_in(v)
        buckets: list[dict[Monomial, Coeff]] = [dict() for _ in range(d + 1)]
        for m, c in self.terms:
            base = m[:v] + (0,) + m[v + 1 :]
            b = buckets[m[v]]
            b[base] = b.get(base, 0) + c
        return [Polynomial(self.nvars, b) for b in buckets]

    def primitive_part(self) -> "Polynomial":
        """Integer-coefficient associate with coprime coefficients and positive lead.

        The leading term is taken in the canonical graded-lex order.  The zero
        polynomial is returned unchanged.
        """
        if not self.terms:
            return self
        den_lcm = 1
        for _, c in self.terms:
            den_lcm = math.lcm(den_lcm, Fraction(c).denominator)
        nums = [int(c * den_lcm) for _, c in self.terms]
        g = 0
        for n in nums:
            g = math.gcd(g, n)
        if nums[0] < 0:
            g = -g
        return Polynomial(self.nvars, tuple((m, n // g) for (m, _), n in zip(self.terms, nums)))

    def permute(self, perm: "VarPermutation") -> "Polynomial":
        """Rename variables: the exponent of x_perm(i) becomes the exponent of x_i."""
        if perm.n != self.nvars:
            raise ValueError("permutation length does not match nvars")
        acc = {}
        for m, c in self.terms:
            new = [0] * self.nvars
            for i, e in enumerate(m):
                new[perm.image[i]] = e
            acc[tuple(new)] = c
        return Polynomial(self.nvars, acc)

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class PolySystem:
    """Non-empty conjunction of non-zero polynomials over a shared variable set."""

    polys: tuple[Polynomial, ...]
    nvars: int

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if not self.polys:
            raise ValueError("system must contain at least one polynomial")
        if self.nvars < 1:
            raise ValueError("nvars must be positive")
        for i, p in enumerate(self.polys):
            if p.nvars != self.nvars:
                raise ValueError(f"polynomial {i} has nvars={p.nvars}, expected {self.nvars}")
            if p.is_zero():
                raise ValueError(f"polynomial {i} is the zero polynomial")

    def __str__(self) -> str:
        return format_system(self)


@dataclass(frozen=True)
class VarPermutation:
    """Bijection on variable indices {0..n-1}; x_i maps to x_image[i]."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"{self.image} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "VarPermutation":
        return cls(tuple(range(n)))

    @classmethod
    def swap(cls, n: int, i: int, j: int) -> "VarPermutation":
        img = list(range(n))
        img[i], img[j] = img[j], img[i]
        return cls(tuple(img))

    def __call__(self, i: int) -> int:
        return self.image[i]

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image))

    def inverse(self) -> "VarPermutation":
        inv = [0] * self.n
        for i, v in enumerate(self.image):
            inv[v] = i
        return VarPermutation(tuple(inv))

    def compose(self, other: "VarPermutation") -> "VarPermutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        if self.n != other.n:
            raise ValueError("permutation sizes differ")
        return VarPermutation(tuple(self.image[other.image[i]] for i in range(self.n)))

    def lex_index(self) -> int:
        """Rank of this permutation in lexicographic enumeration of S_n."""
        return all_permutations(self.n).index(self)


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[VarPermutation, ...]:
    """All permutations of {0..n-1} in lexicographic order of their images."""
    return tuple(VarPermutation(img) for img in itertools.permutations(range(n)))


def apply_permutation(system: PolySystem, perm: VarPermutation) -> PolySystem:
    """Rename variables throughout a system; polynomial order is preserved."""
    if perm.n != system.nvars:
        raise ValueError("permutation length does not match system nvars")
    return PolySystem(tuple(p.permute(perm) for p in system.polys), system.nvars)


# -- ordering labels ---------------------------------------------------------

@lru_cache(maxsize=None)
def orderings(n: int) -> tuple[tuple[int, ...], ...]:
    """All elimination orderings (variable index tuples) in lexicographic order."""
    return tuple(itertools.permutations(range(n)))


def n_labels(n: int) -> int:
    return math.factorial(n)


def label_to_ordering(label: int, n: int = 3) -> tuple[int, ...]:
    """Class label -> elimination ordering (first listed variable goes first)."""
    table = orderings(n)
    if not 0 <= label < len(table):
        raise ValueError(f"label {label} out of range for n={n}")
    return table[label]


def ordering_to_label(ordering: Sequence[int]) -> int:
    """Elimination ordering -> class label under lexicographic enumeration."""
    ordering = tuple(ordering)
    n = len(ordering)
    if sorted(ordering) != list(range(n)):
        raise ValueError(f"{ordering} is not a permutation of 0..{n - 1}")
    return orderings(n).index(ordering)


def permute_label(label: int, perm: VarPermutation) -> int:
    """Label of the ordering obtained by renaming every variable through perm."""
    ordering = label_to_ordering(label, perm.n)
    return ordering_to_label(tuple(perm.image[v] for v in ordering))


# -- parsing -----------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "word" | "op" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("word", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in "+-*/^;":
            toks.append(_Token("op", ch, line, start_col))
            col += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    toks.append(_Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect_op(self, op: str) -> _Token:
        t = self.peek()
        if t.kind != "op" or t.text != op:
            self.fail(f"expected {op!r}, found {t.text!r}" if t.kind != "eof" else f"expected {op!r}, found end of input")
        return self.next()

    def expect_int(self) -> int:
        t = self.peek()
        if t.kind != "int":
            self.fail(f"expected integer, found {t.text!r}" if t.kind != "eof" else "expected integer, found end of input")
        return int(self.next().text)

    def parse_system(self) -> PolySystem:
        head = self.peek()
        if head.kind != "word" or head.text != "vars":
            self.fail("expected 'vars'")
        self.next()
        nvars = self.expect_int()
        if nvars < 1:
            self.fail("variable count must be positive", head)
        self.expect_op(";")
        polys = [self.parse_poly(nvars)]
        while self.peek().kind == "op" and self.peek().text == ";":
            self.next()
            polys.append(self.parse_poly(nvars))
        t = self.peek()
        if t.kind != "eof":
            self.fail(f"unexpected trailing input {t.text!r}")
        return PolySystem(tuple(polys), nvars)

    def parse_poly(self, nvars: int) -> Polynomial:
        start = self.peek()
        acc: dict[Monomial, Coeff] = {}
        sign = 1
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.next()
            sign = -1 if t.text == "-" else 1
        self._parse_term(nvars, sign, acc)
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in "+-":
                self.next()
                self._parse_term(nvars, -1 if t.text == "-" else 1, acc)
            else:
                break
        poly = Polynomial(nvars, acc)
        if poly.is_zero():
            raise ParseError("zero polynomial in system", start.line, start.col)
        return poly

    def _parse_term(self, nvars: int, sign: int, acc: dict[Monomial, Coeff]):
        coeff: Coeff = sign
        expo = [0] * nvars
        first = self.peek()
        if first.kind == "int":
            coeff = sign * self._parse_coeff()
            t = self.peek()
            if not (t.kind == "op" and t.text == "*"):
                key = tuple(expo)
                acc[key] = acc.get(key, 0) + coeff
                return
            self.next()
            self._parse_factor(nvars, expo)
        elif first.kind == "word":
            self._parse_factor(nvars, expo)
        else:
            self.fail(f"expected term, found {first.text!r}" if first.kind != "eof" else "expected term, found end of input")
        while self.peek().kind == "op" and self.peek().text == "*":
            self.next()
            self._parse_factor(nvars, expo)
        key = tuple(expo)
        acc[key] = acc.get(key, 0) + coeff

    def _parse_coeff(self) -> Coeff:
        num = self.expect_int()
        t = self.peek()
        if t.kind == "op" and t.text == "/":
            self.next()
            dtok = self.peek()
            den = self.expect_int()
            if den == 0:
                self.fail("zero denominator", dtok)
            return _norm_coeff(Fraction(num, den))
        return num

    def _parse_factor(self, nvars: int, expo: list[int]):
        t = self.peek()
        if t.kind != "word" or not t.text.startswith("x") or not t.text[1:].isdigit():
            self.fail(f"expected variable factor, found {t.text!r}" if t.kind != "eof" else "expected variable factor, found end of input")
        idx = int(t.text[1:])
        if idx < 1 or idx > nvars:
            self.fail(f"variable x{idx} exceeds declared vars {nvars}", t)
        self.next()
        power = 1
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "^":
            self.next()
            power = self.expect_int()
        expo[idx - 1] += power


def parse_system(text: str) -> PolySystem:
    """Parse system text of the form ``vars N; poly; poly; ...``.

    Raises ParseError (with line/column) on syntax errors, zero polynomials,
    and variable indices exceeding the declared count.  Parsing the output of
    format_system returns an equal system.
    """
    return _Parser(text).parse_system()


def parse_poly(text: str, nvars: int) -> Polynomial:
    """Parse a single polynomial body; convenience wrapper used heavily in tests."""
    system = parse_system(f"vars {nvars}; {text}")
    if len(system.polys) != 1:
        raise ParseError("expected a single polynomial", 1, 1)
    return system.polys[0]


# -- printing ----------------------------------------------------------------

def _format_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _format_term(mono: Monomial, coeff: Coeff) -> str:
    factors = []
    for i, e in enumerate(mono):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e > 1:
            factors.append(f"x{i + 1}^{e}")
    if not factors:
        return _format_coeff(coeff)
    if coeff == 1:
        return "*".join(factors)
    return "*".join([_format_coeff(coeff)] + factors)


def format_poly(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k, (mono, coeff) in enumerate(p.terms):
        neg = coeff < 0
        body = _format_term(mono, -coeff if neg else coeff)
        if k == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"{'-' if neg else '+'} {body}")
    return " ".join(parts)


def format_system(s: PolySystem) -> str:
    return f"vars {s.nvars}; " + "; ".join(format_poly(p) for p in s.polys)
