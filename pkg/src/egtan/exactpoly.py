"""Exact rational arithmetic and sparse multivariate polynomials.

The identity checks in :mod:`egtan.certificates` must produce proofs, not
floating-point evidence, so every coefficient here is a
:class:`fractions.Fraction` and equality means "the coefficient maps are
identical".  ``Rational`` is an alias for ``fractions.Fraction``, which already
guarantees arbitrary-precision reduced form with a positive denominator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

Rational = Fraction

RationalLike = Union[Rational, int, str]


def _as_rational(x: RationalLike) -> Rational:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not allowed in exact polynomials; pass Fraction/int/str")
    return Fraction(x)


class SparsePoly:
    """Sparse polynomial over a fixed, ordered tuple of variable names.

    Terms are stored as ``{exponent_tuple: Fraction}`` with no zero
    coefficients.  Two polynomials are equal iff they share the variable tuple
    and have identical term maps.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, RationalLike] | None = None):
        self.vars = tuple(vars)
        tidy: dict[tuple, Rational] = {}
        if terms:
            n = len(self.vars)
            for exp, coeff in terms.items():
                c = _as_rational(coeff)
                if c == 0:
                    continue
                exp = tuple(exp)
                if len(exp) != n:
                    raise ValueError(f"exponent tuple {exp} does not match {n} variables")
                tidy[exp] = tidy.get(exp, Fraction(0)) + c
                if tidy[exp] == 0:
                    del tidy[exp]
        self.terms = tidy

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, vars: Sequence[str], c: RationalLike) -> "SparsePoly":
        vars = tuple(vars)
        c = _as_rational(c)
        if c == 0:
            return cls(vars)
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def variable(cls, vars: Sequence[str], name: str) -> "SparsePoly":
        vars = tuple(vars)
        exp = [0] * len(vars)
        exp[vars.index(name)] = 1
        return cls(vars, {tuple(exp): Fraction(1)})

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "SparsePoly") -> None:
        if self.vars != other.vars:
            raise ValueError("polynomials are over different variable tuples")

    def __add__(self, other: "SparsePoly | RationalLike") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.vars, other)
        self._check(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            nc = out.get(exp, Fraction(0)) + c
            if nc == 0:
                out.pop(exp, None)
            else:
                out[exp] = nc
        res = SparsePoly(self.vars)
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        res = SparsePoly(self.vars)
        res.terms = {exp: -c for exp, c in self.terms.items()}
        return res

    def __sub__(self, other: "SparsePoly | RationalLike") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other: RationalLike) -> "SparsePoly":
        return SparsePoly.constant(self.vars, other) - self

    def __mul__(self, other: "SparsePoly | RationalLike") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            c = _as_rational(other)
            res = SparsePoly(self.vars)
            if c != 0:
                res.terms = {exp: coeff * c for exp, coeff in self.terms.items()}
            return res
        self._check(other)
        out: dict[tuple, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                nc = out.get(exp, Fraction(0)) + c1 * c2
                if nc == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = nc
        res = SparsePoly(self.vars)
        res.terms = out
        return res

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = SparsePoly.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SparsePoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SparsePoly.constant(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def monomial_count(self) -> int:
        return len(self.terms)

    def coefficient_map(self, names: Sequence[str]) -> dict[tuple, "SparsePoly"]:
        """Group terms by their exponents on ``names``.

        Returns ``{restricted_exponent: polynomial in the remaining
        variables}`` with the remaining variables keeping the full tuple (the
        ``names`` exponents are zeroed out).
        """
        idx = [self.vars.index(n) for n in names]
        groups: dict[tuple, dict[tuple, Rational]] = {}
        for exp, c in self.terms.items():
            key = tuple(exp[i] for i in idx)
            rest = list(exp)
            for i in idx:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        out = {}
        for key, terms in groups.items():
            p = SparsePoly(self.vars)
            p.terms = terms
            out[key] = p
        return out

    # -- substitution, evaluation, division --------------------------------

    def substitute(self, mapping: Mapping[str, "SparsePoly"]) -> "SparsePoly":
        """Replace each named variable by a polynomial (exact composition)."""
        cache = {name: mapping.get(name) for name in self.vars}
        result = SparsePoly(self.vars)
        for exp, c in self.terms.items():
            term = SparsePoly.constant(self.vars, c)
            for i, p in enumerate(exp):
                if p == 0:
                    continue
                base = cache[self.vars[i]]
                if base is None:
                    base = SparsePoly.variable(self.vars, self.vars[i])
                term = term * base**p
            result = result + term
        return result

    def evaluate(self, values: Mapping[str, RationalLike]) -> Rational:
        vals = [_as_rational(values[name]) for name in self.vars]
        total = Fraction(0)
        for exp, c in self.terms.items():
            t = c
            for v, p in zip(vals, exp):
                if p:
                    t *= v**p
            total += t
        return total

    def _leading(self) -> tuple[tuple, Rational]:
        # graded-lex order; any multiplicative order works for exact division
        exp = max(self.terms, key=lambda e: (sum(e), e))
        return exp, self.terms[exp]

    def divide_exact(self, divisor: "SparsePoly") -> "SparsePoly":
        """Return ``self / divisor`` when the division is exact, else raise."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = self
        quo = SparsePoly(self.vars)
        d_exp, d_coeff = divisor._leading()
        while not rem.is_zero():
            r_exp, r_coeff = rem._leading()
            q_exp = tuple(a - b for a, b in zip(r_exp, d_exp))
            if any(p < 0 for p in q_exp):
                raise ValueError("division is not exact")
            t = SparsePoly(self.vars, {q_exp: r_coeff / d_coeff})
            quo = quo + t
            rem = rem - t * divisor
        return quo

    # -- formatting ----------------------------------------------------------

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=lambda e: (-sum(e), tuple(-p for p in e))):
            c = self.terms[exp]
            factors = [
                f"{self.vars[i]}^{p}" if p > 1 else self.vars[i]
                for i, p in enumerate(exp)
                if p
            ]
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def generators(names: Sequence[str]) -> dict[str, SparsePoly]:
    """Polynomial generators for each name, all over the same variable tuple."""
    names = tuple(names)
    return {n: SparsePoly.variable(names, n) for n in names}
