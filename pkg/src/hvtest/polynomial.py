"""Sparse multivariate polynomials over float coefficients.

This is the substrate shared by the model builders, the sum-of-squares
compiler and the certificate verifier.  Polynomials are kept in a canonical
sparse form: a term map from monomial to coefficient, with no zero
coefficients and no zero exponents stored.  Monomial order everywhere is
graded reverse lexicographic (grevlex), ascending, so the constant monomial
comes first and, for two variables, the degree-one slice reads [x2, x1].
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np


class Monomial:
    """An exponent map {variable index: exponent}, zero exponents dropped."""

    __slots__ = ("pairs", "degree")

    def __init__(self, pairs: Iterable[Tuple[int, int]] = ()):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        cleaned = []
        for idx, exp in pairs:
            if exp < 0:
                raise ValueError("negative exponent %r for variable %d" % (exp, idx))
            if exp != 0:
                cleaned.append((int(idx), int(exp)))
        cleaned.sort()
        for (a, _), (b, _) in zip(cleaned, cleaned[1:]):
            if a == b:
                raise ValueError("duplicate variable index %d" % a)
        self.pairs: Tuple[Tuple[int, int], ...] = tuple(cleaned)
        self.degree: int = sum(e for _, e in cleaned)

    @classmethod
    def from_dense(cls, exps: Sequence[int]) -> "Monomial":
        return cls(tuple((i, e) for i, e in enumerate(exps) if e))

    def dense(self, nvars: int) -> Tuple[int, ...]:
        out = [0] * nvars
        for i, e in self.pairs:
            if i >= nvars:
                raise ValueError("monomial uses variable %d beyond nvars=%d" % (i, nvars))
            out[i] = e
        return tuple(out)

    def exponent(self, idx: int) -> int:
        for i, e in self.pairs:
            if i == idx:
                return e
        return 0

    def max_var(self) -> int:
        """Largest variable index used, or -1 for the constant monomial."""
        return self.pairs[-1][0] if self.pairs else -1

    def mul(self, other: "Monomial") -> "Monomial":
        if not self.pairs:
            return other
        if not other.pairs:
            return self
        merged: Dict[int, int] = dict(self.pairs)
        for i, e in other.pairs:
            merged[i] = merged.get(i, 0) + e
        return Monomial(merged)

    def grevlex_key(self, nvars: int) -> Tuple:
        """Ascending sort key: by total degree, ties broken reverse-lex.

        Within a degree, the monomial whose trailing exponent difference is
        positive sorts lower, which puts x2 before x1 for two variables.
        """
        dense = self.dense(nvars)
        return (self.degree, tuple(-e for e in reversed(dense)))

    def eval(self, x: Sequence[float]) -> float:
        v = 1.0
        for i, e in self.pairs:
            v *= x[i] ** e
        return v

    def __mul__(self, other: "Monomial") -> "Monomial":
        return self.mul(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        if not self.pairs:
            return "1"
        return "*".join(
            "x%d" % i if e == 1 else "x%d^%d" % (i, e) for i, e in self.pairs
        )


ONE = Monomial(())


class Polynomial:
    """Immutable-by-convention sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Monomial, float] | None = None):
        self.nvars = int(nvars)
        clean: Dict[Monomial, float] = {}
        if terms:
            for mono, coeff in terms.items():
                c = float(coeff)
                if c != 0.0:
                    if mono.max_var() >= self.nvars:
                        raise ValueError(
                            "monomial %r out of range for nvars=%d" % (mono, self.nvars)
                        )
                    clean[mono] = c
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: float) -> "Polynomial":
        return cls(nvars, {ONE: value})

    @classmethod
    def variable(cls, nvars: int, idx: int) -> "Polynomial":
        if not 0 <= idx < nvars:
            raise ValueError("variable index %d out of range" % idx)
        return cls(nvars, {Monomial(((idx, 1),)): 1.0})

    @classmethod
    def from_terms(
        cls, nvars: int, terms: Iterable[Tuple[float, Sequence[int]]]
    ) -> "Polynomial":
        """Build from (coefficient, dense exponent list) pairs."""
        acc: Dict[Monomial, float] = {}
        for coeff, exps in terms:
            mono = Monomial.from_dense(exps)
            acc[mono] = acc.get(mono, 0.0) + float(coeff)
        return cls(nvars, acc)

    # ---- queries -------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def coeff(self, mono: Monomial) -> float:
        return self.terms.get(mono, 0.0)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self):
        return self.terms.keys()

    def terms_sorted(self) -> List[Tuple[float, Monomial]]:
        order = sorted(self.terms, key=lambda m: m.grevlex_key(self.nvars))
        return [(self.terms[m], m) for m in order]

    def var_degree(self, idx: int) -> int:
        return max((m.exponent(idx) for m in self.terms), default=0)

    # ---- arithmetic ----------------------------------------------------

    def _require_same_ring(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(
                "mixing polynomials in %d and %d variables" % (self.nvars, other.nvars)
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        acc = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc[mono] = acc.get(mono, 0.0) + coeff
        return Polynomial(self.nvars, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        acc = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc[mono] = acc.get(mono, 0.0) - coeff
        return Polynomial(self.nvars, acc)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        acc: Dict[Monomial, float] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = ma.mul(mb)
                acc[m] = acc.get(m, 0.0) + ca * cb
        return Polynomial(self.nvars, acc)

    def scale(self, factor: float) -> "Polynomial":
        f = float(factor)
        if f == 0.0:
            return Polynomial.zero(self.nvars)
        return Polynomial(self.nvars, {m: c * f for m, c in self.terms.items()})

    def shift_constant(self, delta: float) -> "Polynomial":
        acc = dict(self.terms)
        acc[ONE] = acc.get(ONE, 0.0) + float(delta)
        return Polynomial(self.nvars, acc)

    # ---- evaluation ----------------------------------------------------

    def eval(self, x: Sequence[float]) -> float:
        if len(x) != self.nvars:
            raise ValueError("point has length %d, expected %d" % (len(x), self.nvars))
        return sum(c * m.eval(x) for m, c in self.terms.items())

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at each row of an (N, nvars) array."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.nvars:
            raise ValueError("expected (N, %d) array" % self.nvars)
        out = np.zeros(pts.shape[0])
        for mono, coeff in self.terms.items():
            term = np.full(pts.shape[0], coeff)
            for i, e in mono.pairs:
                term = term * pts[:, i] ** e
            out += term
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("Polynomial is not hashable")

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coeff, mono in self.terms_sorted():
            parts.append("%+g*%r" % (coeff, mono))
        return " ".join(parts)


def basis_size(nvars: int, degree: int) -> int:
    return math.comb(nvars + degree, degree)


def enumerate_monomials(nvars: int, degree: int) -> List[Monomial]:
    """All monomials of total degree <= degree, ascending grevlex."""
    if nvars < 1:
        raise ValueError("nvars must be >= 1")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    monos: List[Monomial] = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            exps: Dict[int, int] = {}
            for idx in combo:
                exps[idx] = exps.get(idx, 0) + 1
            monos.append(Monomial(exps))
    monos.sort(key=lambda m: m.grevlex_key(nvars))
    return monos


class MonomialBasis:
    """An ordered monomial basis used to index Gram matrix rows/columns."""

    __slots__ = ("nvars", "degree", "entries", "index")

    def __init__(self, nvars: int, degree: int, entries: List[Monomial] | None = None):
        self.nvars = nvars
        self.degree = degree
        if entries is None:
            entries = enumerate_monomials(nvars, degree)
        else:
            entries = sorted(entries, key=lambda m: m.grevlex_key(nvars))
        self.entries = entries
        self.index = {m: i for i, m in enumerate(entries)}
        if len(self.index) != len(entries):
            raise ValueError("duplicate monomials in basis")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def restrict(self, keep) -> "MonomialBasis":
        kept = [m for m in self.entries if keep(m)]
        return MonomialBasis(self.nvars, self.degree, kept)

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """Matrix of basis values, shape (N, len(basis))."""
        pts = np.asarray(pts, dtype=float)
        out = np.empty((pts.shape[0], len(self.entries)))
        for j, mono in enumerate(self.entries):
            col = np.ones(pts.shape[0])
            for i, e in mono.pairs:
                col = col * pts[:, i] ** e
            out[:, j] = col
        return out

    def __repr__(self) -> str:
        return "MonomialBasis(nvars=%d, degree=%d, size=%d)" % (
            self.nvars,
            self.degree,
            len(self.entries),
        )
