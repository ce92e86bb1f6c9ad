"""Multivariate polynomials and rational functions over the series field.

Coefficients are :class:`FieldElement` values; exponent vectors are tuples of
non-negative ints keyed to an ordered variable tuple.  Rational functions are
kept unreduced; equality is the cross-multiplication identity.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import DivisionByZero, PrecisionExhausted, UndefinedGauss
from .series import (
    EQ,
    GT,
    LT,
    FieldElement,
    TOP,
    ValueGroupElement,
    compare_order,
    format_element,
)

Scalar = Union[int, Fraction, FieldElement]

_VAR_RE = re.compile(r"^([a-zA-Z]+?)(\d*)$")


def variable_sort_key(name: str):
    """Natural order: x1 < x2 < x10; plain letters alphabetically."""
    m = _VAR_RE.match(name)
    if not m:
        return (name, -1)
    stem, digits = m.groups()
    return (stem, int(digits) if digits else -1)


def merge_variables(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    return tuple(sorted(set(a) | set(b), key=variable_sort_key))


def _as_coeff(c: Scalar) -> FieldElement:
    if isinstance(c, FieldElement):
        return c
    return FieldElement.from_rational(c)


class Polynomial:
    """terms: exponent-vector -> nonzero FieldElement coefficient."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], Scalar] = ()):
        variables = tuple(variables)
        clean: dict[tuple[int, ...], FieldElement] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for expv, c in items:
            expv = tuple(int(e) for e in expv)
            if len(expv) != len(variables):
                raise ValueError(f"exponent vector {expv} does not match arity {len(variables)}")
            if any(e < 0 for e in expv):
                raise ValueError("polynomial exponents must be non-negative")
            c = _as_coeff(c)
            if expv in clean:
                c = clean[expv] + c
            if c.is_exact_zero():
                clean.pop(expv, None)
            else:
                clean[expv] = c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(c: Scalar, variables: Sequence[str] = ()) -> "Polynomial":
        vs = tuple(variables)
        return Polynomial(vs, {(0,) * len(vs): _as_coeff(c)})

    @staticmethod
    def variable(name: str, variables: Sequence[str] | None = None) -> "Polynomial":
        vs = tuple(variables) if variables is not None else (name,)
        expv = tuple(1 if v == name else 0 for v in vs)
        if name not in vs:
            raise ValueError(f"{name} not among {vs}")
        return Polynomial(vs, {expv: FieldElement.one()})

    def with_variables(self, variables: Sequence[str]) -> "Polynomial":
        """Re-embed into a larger variable frame (must contain the current one)."""
        variables = tuple(variables)
        idx = []
        for v in self.variables:
            if v not in variables:
                raise ValueError(f"variable {v} missing from target frame {variables}")
            idx.append(variables.index(v))
        terms = {}
        for expv, c in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(idx, expv):
                new[pos] = e
            terms[tuple(new)] = c
        return Polynomial(variables, terms)

    # -- queries --------------------------------------------------------------

    def is_exactly_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expv) for expv in self.terms)

    def constant_value(self) -> FieldElement:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        for c in self.terms.values():
            return c
        return FieldElement.zero()

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def coefficient(self, expv: tuple[int, ...]) -> FieldElement:
        return self.terms.get(tuple(expv), FieldElement.zero())

    # -- arithmetic -------------------------------------------------------------

    def _aligned(self, other) -> tuple["Polynomial", "Polynomial"]:
        if isinstance(other, (int, Fraction, FieldElement)):
            other = Polynomial.constant(other, self.variables)
        if not isinstance(other, Polynomial):
            return NotImplemented, NotImplemented
        if self.variables == other.variables:
            return self, other
        vs = merge_variables(self.variables, other.variables)
        return self.with_variables(vs), other.with_variables(vs)

    def __add__(self, other):
        a, b = self._aligned(other)
        if a is NotImplemented:
            return NotImplemented
        terms = dict(a.terms)
        out = list(terms.items()) + list(b.terms.items())
        return Polynomial(a.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._aligned(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._aligned(other)
        if a is NotImplemented:
            return NotImplemented
        terms: list[tuple[tuple[int, ...], FieldElement]] = []
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                terms.append((tuple(x + y for x, y in zip(e1, e2)), c1 * c2))
        return Polynomial(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial; use RationalFunction")
        result = Polynomial.constant(1, self.variables)
        for _ in range(n):
            result = result * self
        return result

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_coeff(c)
        return Polynomial(self.variables, {e: co * c for e, co in self.terms.items()})

    def scale_coefficients(self, f) -> "Polynomial":
        """Apply an exact map to every coefficient (used for eps-power shifts)."""
        return Polynomial(self.variables, {e: f(c) for e, c in self.terms.items()})

    # -- evaluation and substitution ---------------------------------------------

    def evaluate(self, point: Sequence[FieldElement]) -> FieldElement:
        if len(point) != len(self.variables):
            raise ValueError(f"point arity {len(point)} != {len(self.variables)}")
        point = [_as_coeff(p) for p in point]
        total = FieldElement.zero()
        for expv, c in self.terms.items():
            val = c
            for x, e in zip(point, expv):
                if e:
                    val = val * x**e
            total = total + val
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Polynomial substitution variable_i -> images[i] (images share one frame)."""
        if len(images) != len(self.variables):
            raise ValueError("substitution arity mismatch")
        if not images:
            return self
        frame = images[0].variables
        acc = Polynomial(frame)
        for expv, c in self.terms.items():
            term = Polynomial.constant(c, frame)
            for img, e in zip(images, expv):
                for _ in range(e):
                    term = term * img
            acc = acc + term
        return acc

    def substitute_rational(self, images: Sequence["RationalFunction"]) -> "RationalFunction":
        """Substitution by rational functions, exactly, via common denominators."""
        if len(images) != len(self.variables):
            raise ValueError("substitution arity mismatch")
        if not images:
            return RationalFunction(self, Polynomial.constant(1, self.variables))
        frame = images[0].num.variables
        acc = RationalFunction(Polynomial(frame), Polynomial.constant(1, frame))
        for expv, c in self.terms.items():
            term = RationalFunction(Polynomial.constant(c, frame), Polynomial.constant(1, frame))
            for img, e in zip(images, expv):
                for _ in range(e):
                    term = term * img
            acc = acc + term
        return acc

    def gauss_valuation(self) -> ValueGroupElement:
        """Minimum coefficient valuation; TOP for the zero polynomial."""
        if not self.terms:
            return TOP
        best: ValueGroupElement | None = None
        for c in self.terms.values():
            v = c.valuation()
            if best is None or v < best:
                best = v
        return best

    def residue_shift(self, gamma: Fraction) -> "Polynomial":
        """Divide every coefficient by eps^gamma (exact)."""
        shift = FieldElement.eps_power(-gamma)
        return self.scale_coefficients(lambda c: c * shift)

    # -- equality ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        a, b = self._aligned(other)
        if a is NotImplemented:
            return NotImplemented
        return (a - b).is_exactly_zero()

    __hash__ = None

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)})"


class RationalFunction:
    """Unreduced quotient of polynomials; denominator not the zero polynomial."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(1, num.variables)
        if den.is_exactly_zero():
            raise DivisionByZero("zero denominator polynomial")
        if num.variables != den.variables:
            vs = merge_variables(num.variables, den.variables)
            num, den = num.with_variables(vs), den.with_variables(vs)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p)

    @staticmethod
    def constant(c: Scalar, variables: Sequence[str] = ()) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(c, variables))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def with_variables(self, variables: Sequence[str]) -> "RationalFunction":
        return RationalFunction(self.num.with_variables(variables), self.den.with_variables(variables))

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction, FieldElement)):
            return RationalFunction(Polynomial.constant(other, self.variables))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_exactly_zero():
            raise DivisionByZero("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return (RationalFunction.constant(1, self.variables) / self) ** (-n)
        return RationalFunction(self.num**n, self.den**n)

    def substitute_rational(self, images: Sequence["RationalFunction"]) -> "RationalFunction":
        return self.num.substitute_rational(images) / self.den.substitute_rational(images)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_exactly_zero()

    __hash__ = None

    def __str__(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == FieldElement.one():
            return format_polynomial(self.num)
        return f"({format_polynomial(self.num)})/({format_polynomial(self.den)})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def poly_eval(q: Union[Polynomial, RationalFunction], point: Sequence[FieldElement]) -> FieldElement:
    """Exact evaluation; quotients raise DivisionByZero on vanishing denominators."""
    if isinstance(q, Polynomial):
        return q.evaluate(point)
    num = q.num.evaluate(point)
    den = q.den.evaluate(point)
    if den.is_exact_zero():
        raise DivisionByZero("denominator vanishes at the point")
    return num / den


def valuation_at(q: Union[Polynomial, RationalFunction], point: Sequence[FieldElement]) -> ValueGroupElement:
    """Valuation of q(point) computed exactly from numerator and denominator."""
    if isinstance(q, Polynomial):
        return q.evaluate(point).valuation()
    num = q.num.evaluate(point)
    den = q.den.evaluate(point)
    if den.is_exact_zero():
        raise DivisionByZero("denominator vanishes at the point")
    return num.valuation() - den.valuation()


def gauss_valuation(q: Union[Polynomial, RationalFunction]) -> ValueGroupElement:
    """Min coefficient valuation for polynomials; num minus den for quotients."""
    if isinstance(q, Polynomial):
        return q.gauss_valuation()
    if q.den.is_exactly_zero():
        raise UndefinedGauss("zero denominator polynomial")
    den_g = q.den.gauss_valuation()
    if den_g.is_top:
        raise UndefinedGauss("zero denominator polynomial")
    return q.num.gauss_valuation() - den_g


# -- canonical rendering -------------------------------------------------------


def _format_power(v: str, e: int) -> str:
    return v if e == 1 else f"{v}^{e}"


def format_polynomial(p: Polynomial) -> str:
    """Canonical text, graded-lex descending; parses back to the same polynomial."""
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda ev: (sum(ev), ev), reverse=True)
    parts = []
    for expv in keys:
        c = p.terms[expv]
        monos = [_format_power(v, e) for v, e in zip(p.variables, expv) if e]
        if len(c.terms) == 1 and c.precision is None:
            coeff_txt = format_element(c)
            wrap = False
        else:
            coeff_txt = f"({format_element(c)})"
            wrap = True
        if not monos:
            parts.append(coeff_txt)
        elif not wrap and coeff_txt == "1":
            parts.append("*".join(monos))
        else:
            parts.append(coeff_txt + "*" + "*".join(monos))
    return " + ".join(parts)
