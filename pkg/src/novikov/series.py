"""Exact single-variable Novikov series with explicit truncation.

A series is a finite sum of terms ``c * q**d`` with rational coefficient
``c`` and rational exponent ``d``, together with a truncation order ``T``:
every term with exponent below ``T`` is exactly represented, nothing is
known at or above ``T``.  ``T = +inf`` means the series is exact.

All arithmetic propagates truncation so that identity checks either hold
exactly, fail exactly, or raise :class:`InsufficientPrecision` - they never
silently pass because terms fell off the end.

The same type doubles as the Laurent-type series field in an auxiliary
variable (``h`` in the mirror computations); only rendering cares about the
variable's name.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

from .errors import InsufficientPrecision, ParseError

#: Truncation value meaning "exact": comparisons and sums with Fractions
#: behave correctly (Fraction < INF, Fraction + INF == INF).
INF = math.inf

Rat = Union[int, Fraction]
Trunc = Union[Fraction, float]


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational literal: {x!r}") from exc
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def _trunc(x) -> Trunc:
    if x == INF:
        return INF
    return _rat(x)


class NovikovSeries:
    """Finite rational-exponent series with a carried truncation order."""

    __slots__ = ("terms", "truncation")

    def __init__(self, terms: Iterable[tuple[Rat, Rat]] = (), truncation: Trunc = INF):
        trunc = _trunc(truncation)
        acc: dict[Fraction, Fraction] = {}
        for exp, coeff in terms:
            e, c = _rat(exp), _rat(coeff)
            if c == 0 or e >= trunc:
                continue
            c = acc.get(e, Fraction(0)) + c
            if c == 0:
                acc.pop(e, None)
            else:
                acc[e] = c
        self.terms: tuple[tuple[Fraction, Fraction], ...] = tuple(sorted(acc.items()))
        self.truncation: Trunc = trunc

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, truncation: Trunc = INF) -> "NovikovSeries":
        return cls((), truncation)

    @classmethod
    def one(cls, truncation: Trunc = INF) -> "NovikovSeries":
        return cls(((0, 1),), truncation)

    @classmethod
    def monomial(cls, coeff: Rat, exp: Rat, truncation: Trunc = INF) -> "NovikovSeries":
        return cls(((exp, coeff),), truncation)

    @classmethod
    def q(cls) -> "NovikovSeries":
        return cls.monomial(1, 1)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        """True if no nonzero term is stored (zero as far as representable)."""
        return not self.terms

    def valuation(self) -> Trunc:
        """Exponent of the lowest term; +inf for zero by convention."""
        return self.terms[0][0] if self.terms else INF

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            raise ZeroDivisionError("zero series has no leading coefficient")
        return self.terms[0][1]

    def coefficient(self, exp: Rat) -> Fraction:
        e = _rat(exp)
        for te, tc in self.terms:
            if te == e:
                return tc
        return Fraction(0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def truncate(self, order: Trunc) -> "NovikovSeries":
        order = _trunc(order)
        return NovikovSeries(self.terms, min(self.truncation, order))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        other = _coerce(other)
        trunc = min(self.truncation, other.truncation)
        return NovikovSeries(self.terms + other.terms, trunc)

    __radd__ = __add__

    def __neg__(self) -> "NovikovSeries":
        return NovikovSeries(((e, -c) for e, c in self.terms), self.truncation)

    def __sub__(self, other: "NovikovSeries") -> "NovikovSeries":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "NovikovSeries":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "NovikovSeries":
        other = _coerce(other)
        # min(T_a + val(b), T_b + val(a)); valuation of zero is +inf, so a
        # factor of exact zero yields exact zero.
        trunc = min(self.truncation + other.valuation(),
                    other.truncation + self.valuation())
        prods = ((ea + eb, ca * cb)
                 for ea, ca in self.terms for eb, cb in other.terms)
        return NovikovSeries(prods, trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "NovikovSeries":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = NovikovSeries.one()
        for _ in range(n):
            out = out * self
        return out

    def invert(self, order: Trunc | None = None) -> "NovikovSeries":
        """Multiplicative inverse, exact up to ``T - 2*val`` (capped by *order*).

        The leading term must be nonzero within truncation.  An exact
        multi-term series has an infinite inverse expansion, so *order*
        must then be supplied.
        """
        if not self.terms:
            raise ZeroDivisionError("no invertible leading term within truncation")
        v = self.valuation()
        lead = self.leading_coefficient()
        target = self.truncation - 2 * v
        if order is not None:
            target = min(target, _trunc(order))
        if target == INF and len(self.terms) > 1:
            raise ValueError(
                "inverse of a multi-term exact series is infinite; pass order=")
        head = NovikovSeries.monomial(1 / lead, -v)
        if len(self.terms) == 1:
            return head.truncate(target)
        # a = lead*q^v*(1+x): expand 1/(1+x) geometrically to relative
        # precision target + v, then shift back.
        rel = target + v
        x = NovikovSeries(((e - v, c / lead) for e, c in self.terms[1:]), rel)
        acc = NovikovSeries.one(rel)
        power = NovikovSeries.one(rel)
        while True:
            power = (power * (-x)).truncate(rel)
            if power.is_zero():
                break
            acc = acc + power
        return (head * acc).truncate(target)

    def d_q(self) -> "NovikovSeries":
        """Termwise derivative ``c*d*q^(d-1)``; truncation drops by one."""
        return NovikovSeries(((e - 1, c * e) for e, c in self.terms),
                             self.truncation - 1)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, (NovikovSeries, int, Fraction)):
            return NotImplemented
        other = _coerce(other)
        return self.terms == other.terms and self.truncation == other.truncation

    def __hash__(self):
        return hash((self.terms, self.truncation))

    def equal_up_to(self, other: "NovikovSeries", order: Rat) -> bool:
        """Compare all terms below *order*; both operands must carry at
        least that much precision, otherwise the comparison is meaningless
        and raises :class:`InsufficientPrecision`."""
        other = _coerce(other)
        d = _trunc(order)
        if min(self.truncation, other.truncation) < d:
            raise InsufficientPrecision(
                f"comparison up to q^{d} needs truncation >= {d}, have "
                f"{self.truncation} and {other.truncation}")
        diff = self - other
        return all(e >= d for e, _ in diff.terms)

    # -- rendering / encoding ---------------------------------------------

    def render(self, var: str = "q") -> str:
        """Canonical text form, e.g. ``1/2*q^-1 + 3*q^2 + O(q^5)``."""
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e, c in self.terms:
                parts.append(_render_term(e, c, var, first=not parts))
            body = "".join(parts)
        if self.truncation != INF:
            tail = f"O({var}^{_render_exp(self.truncation)})"
            body = tail if body == "0" else f"{body} + {tail}"
        return body

    def __repr__(self) -> str:
        return f"NovikovSeries({self.render()})"

    def to_json(self) -> dict:
        return {
            "terms": [{"exp": str(e), "coeff": str(c)} for e, c in self.terms],
            "trunc": "inf" if self.truncation == INF else str(self.truncation),
        }

    @classmethod
    def from_json(cls, data) -> "NovikovSeries":
        if isinstance(data, (int, str)):
            return cls.monomial(_rat(data), 0)
        if not isinstance(data, dict):
            raise ParseError(f"series must be an object, got {type(data).__name__}")
        trunc: Trunc = INF
        raw = data.get("trunc", "inf")
        if raw not in ("inf", None):
            trunc = _rat(raw)
        terms = []
        for rec in data.get("terms", []):
            terms.append((_rat(rec["exp"]), _rat(rec["coeff"])))
        return cls(terms, trunc)


def _coerce(x) -> NovikovSeries:
    if isinstance(x, NovikovSeries):
        return x
    if isinstance(x, (int, Fraction)):
        return NovikovSeries.monomial(x, 0)
    raise TypeError(f"cannot treat {type(x).__name__} as a series")


def _render_exp(e) -> str:
    if e == INF:
        return "inf"
    return str(e) if e.denominator == 1 else f"({e})"


def _render_term(e: Fraction, c: Fraction, var: str, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = -c if c < 0 else c
    if e == 0:
        body = str(mag)
    elif mag == 1:
        body = f"{var}^{_render_exp(e)}"
    else:
        body = f"{mag}*{var}^{_render_exp(e)}"
    if first:
        return body if c > 0 else f"-{body}"
    return f" {sign} {body}"


def equal_up_to(a: NovikovSeries, b: NovikovSeries, order: Rat) -> bool:
    return _coerce(a).equal_up_to(b, order)
