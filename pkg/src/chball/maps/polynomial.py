"""Sparse multivariate polynomials with complex coefficients."""

from __future__ import annotations

from collections import defaultdict
from numbers import Number

import numpy as np

from ..errors import DimensionError


class Polynomial:
    """sum_k c_k z^{e_k} stored as {exponent tuple: coefficient}.

    Evaluation accepts real or complex arrays of shape (..., nvars).
    Zero coefficients are dropped on construction.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise DimensionError("nvars must be non-negative")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise DimensionError(f"bad exponent vector {exps} for {nvars} variables")
            c = complex(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
        self.nvars = nvars
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # construction helpers
    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int, coeff=1.0) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): coeff})

    @classmethod
    def linear(cls, coeffs, const=0.0) -> "Polynomial":
        """const + sum_i coeffs[i] z_i."""
        coeffs = np.asarray(coeffs, dtype=complex)
        n = len(coeffs)
        p = cls.constant(const, n)
        for i, a in enumerate(coeffs):
            p = p + cls.variable(i, n, a)
        return p

    # inspection
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps) -> complex:
        return self.terms.get(tuple(exps), 0j)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError("polynomials in different numbers of variables")
            return other
        if isinstance(other, Number):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(complex)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(1.0, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self):
        parts = [f"({c:.6g})*z^{e}" for e, c in sorted(self.terms.items())]
        return f"Polynomial({self.nvars}: " + (" + ".join(parts) or "0") + ")"

    # evaluation and substitution
    def __call__(self, z):
        z = np.asarray(z)
        if z.shape[-1] != self.nvars:
            raise DimensionError(f"expected {self.nvars} coordinates, got {z.shape[-1]}")
        out = np.zeros(z.shape[:-1], dtype=complex)
        for e, c in self.terms.items():
            term = np.full(z.shape[:-1], c, dtype=complex)
            for i, k in enumerate(e):
                if k:
                    term = term * z[..., i] ** k
            out = out + term
        return out

    def homogenize(self, degree: int | None = None) -> "Polynomial":
        """Homogeneous polynomial in nvars+1 variables (the last one is the
        homogenizing variable) of the given total degree."""
        D = self.degree() if degree is None else degree
        if D < self.degree():
            raise ValueError("homogenizing degree below the polynomial degree")
        return Polynomial(self.nvars + 1, {e + (D - sum(e),): c for e, c in self.terms.items()})

    def substitute(self, polys) -> "Polynomial":
        """p(q_1, ..., q_n) for polynomials q_i sharing one variable count."""
        polys = list(polys)
        if len(polys) != self.nvars:
            raise DimensionError("need one substitute per variable")
        n = polys[0].nvars
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(i, k):
            if (i, k) not in cache:
                cache[(i, k)] = polys[i] ** k
            return cache[(i, k)]

        out = Polynomial(n)
        for e, c in self.terms.items():
            term = Polynomial.constant(c, n)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def conjugate_coefficients(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: np.conj(c) for e, c in self.terms.items()})

    # serialization
    def to_json(self) -> list[dict]:
        return [
            {"coeff": [float(c.real), float(c.imag)], "exponents": list(e)}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data, nvars: int | None = None) -> "Polynomial":
        terms = {}
        for t in data:
            exps = tuple(int(e) for e in t["exponents"])
            if nvars is None:
                nvars = len(exps)
            re, im = t["coeff"]
            terms[exps] = terms.get(exps, 0) + complex(re, im)
        if nvars is None:
            raise DimensionError("cannot infer the variable count of an empty polynomial")
        return cls(nvars, terms)
