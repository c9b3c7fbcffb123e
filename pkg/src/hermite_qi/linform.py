"""Sparse exact affine forms ``const + sum(coef[key] * key)`` over hashable keys."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class LinearForm:
    __slots__ = ("terms", "const")

    def __init__(self, terms=None, const=0):
        self.terms: dict = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}
        self.const = Fraction(const)

    @classmethod
    def var(cls, key) -> "LinearForm":
        return cls({key: 1})

    def _combine(self, other, sign):
        if isinstance(other, LinearForm):
            out = dict(self.terms)
            for k, v in other.terms.items():
                out[k] = out.get(k, 0) + sign * v
            return LinearForm(out, self.const + sign * other.const)
        if isinstance(other, (int, Rational)):
            return LinearForm(self.terms, self.const + sign * other)
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return LinearForm({k: -v for k, v in self.terms.items()}, -self.const)

    def __mul__(self, s):
        if isinstance(s, LinearForm) or not isinstance(s, (int, Rational)):
            return NotImplemented
        return LinearForm({k: v * s for k, v in self.terms.items()}, self.const * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1 / Fraction(s))

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = LinearForm(const=other)
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.terms == other.terms and self.const == other.const

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.const))

    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def evaluate(self, values) -> Fraction:
        """Substitute ``values[key]`` for every variable."""
        return self.const + sum((v * values[k] for k, v in self.terms.items()), Fraction(0))

    def __repr__(self):
        parts = [f"{v}*{k!r}" for k, v in self.terms.items()]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)
