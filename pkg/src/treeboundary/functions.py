"""Locally constant functions on the boundary with Gaussian-rational values.

A level-k function is a table over the depth-k cylinder partition.  Values
are complex numbers with rational real and imaginary parts, so every algebra
operation, integral and statistic downstream stays exact.  The group acts by
``(g.phi)(xi) = phi(g^-1 xi)``; translating a level-k function gives a level
``k + |g|`` function.  Tables are never pruned back to a coarser level
(translations stay cheap); equality refines both sides first.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .words import DEFAULT_BUDGET, FreeGroup, Word, mul, word_from_str, word_to_str
from .boundary import BoundaryPoint, Cylinder, VisualStructure, depth_mass

RationalLike = Union[int, Fraction, "GaussianRational", tuple, complex]


@dataclass(frozen=True)
class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value: RationalLike) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, tuple):
            return GaussianRational(Fraction(value[0]), Fraction(value[1]))
        if isinstance(value, complex):
            # convenience for literals like 1j in tests; exact binary floats
            return GaussianRational(Fraction(value.real), Fraction(value.imag))
        return GaussianRational(Fraction(value))

    @staticmethod
    def _coerce(value) -> "GaussianRational | None":
        """of(), but None for foreign types so dunders can defer."""
        try:
            return GaussianRational.of(value)
        except TypeError:
            return None

    def __add__(self, other: RationalLike) -> "GaussianRational":
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: RationalLike) -> "GaussianRational":
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: RationalLike) -> "GaussianRational":
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: RationalLike) -> "GaussianRational":
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: RationalLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / d, -o.im / d)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        return f"{self.re}+{self.im}i" if self.im else str(self.re)


QQ_ZERO = GaussianRational()
QQ_ONE = GaussianRational(Fraction(1))
QQ_I = GaussianRational(Fraction(0), Fraction(1))


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class LocallyConstantFunction:
    """A level-k table of Gaussian-rational values, one per depth-k cylinder.

    Instances are immutable by convention; all operations return new objects.
    """

    def __init__(
        self,
        group: FreeGroup,
        depth: int,
        values: Mapping[Word, RationalLike],
    ):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        expected = group.sphere_count(depth)
        if len(values) != expected:
            raise ValueError(
                f"{len(values)} values given, the depth-{depth} partition has {expected} cells"
            )
        table: dict[Word, GaussianRational] = {}
        for w, v in values.items():
            if len(w) != depth:
                raise ValueError(f"key {w!r} does not have depth {depth}")
            group.check_letters(w.letters)
            table[w] = GaussianRational.of(v)
        self.group = group
        self.depth = depth
        self.values = dict(sorted(table.items()))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def constant(cls, group: FreeGroup, value: RationalLike) -> "LocallyConstantFunction":
        return cls(group, 0, {Word(): value})

    @classmethod
    def indicator(cls, group: FreeGroup, c: Cylinder | Word) -> "LocallyConstantFunction":
        w = c.prefix if isinstance(c, Cylinder) else c
        vals = {u: (1 if u == w else 0) for u in group.sphere(len(w))}
        return cls(group, len(w), vals)

    # ------------------------------------------------------------------
    # evaluation and refinement

    def eval(self, xi: Union[BoundaryPoint, Cylinder, Word]) -> GaussianRational:
        if isinstance(xi, BoundaryPoint):
            return self.values[xi.prefix(self.depth)]
        w = xi.prefix if isinstance(xi, Cylinder) else xi
        if len(w) < self.depth:
            raise ValueError(
                f"cylinder of depth {len(w)} does not determine a level-{self.depth} value"
            )
        return self.values[w.prefix(self.depth)]

    def refine(self, depth: int, budget: int = DEFAULT_BUDGET) -> "LocallyConstantFunction":
        if depth < self.depth:
            raise ValueError("cannot refine to a coarser level")
        if depth == self.depth:
            return self
        vals = {
            u: self.values[u.prefix(self.depth)]
            for u in self.group.sphere(depth, budget=budget)
        }
        return LocallyConstantFunction(self.group, depth, vals)

    def _pair(self, other: "LocallyConstantFunction"):
        if other.group != self.group:
            raise ValueError("functions live over different groups")
        d = max(self.depth, other.depth)
        return self.refine(d), other.refine(d)

    # ------------------------------------------------------------------
    # *-algebra operations, all exact

    def __add__(self, other) -> "LocallyConstantFunction":
        if not isinstance(other, LocallyConstantFunction):
            other = LocallyConstantFunction.constant(self.group, other)
        f, g = self._pair(other)
        return LocallyConstantFunction(
            f.group, f.depth, {w: f.values[w] + g.values[w] for w in f.values}
        )

    __radd__ = __add__

    def __neg__(self) -> "LocallyConstantFunction":
        return LocallyConstantFunction(
            self.group, self.depth, {w: -v for w, v in self.values.items()}
        )

    def __sub__(self, other) -> "LocallyConstantFunction":
        return self + (-other if isinstance(other, LocallyConstantFunction)
                       else -GaussianRational.of(other))

    def __mul__(self, other) -> "LocallyConstantFunction":
        if not isinstance(other, LocallyConstantFunction):
            c = GaussianRational.of(other)
            return LocallyConstantFunction(
                self.group, self.depth, {w: v * c for w, v in self.values.items()}
            )
        f, g = self._pair(other)
        return LocallyConstantFunction(
            f.group, f.depth, {w: f.values[w] * g.values[w] for w in f.values}
        )

    __rmul__ = __mul__

    def conjugate(self) -> "LocallyConstantFunction":
        return LocallyConstantFunction(
            self.group, self.depth, {w: v.conjugate() for w, v in self.values.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocallyConstantFunction):
            return NotImplemented
        f, g = self._pair(other)
        return f.values == g.values

    __hash__ = None  # refinement-based equality; not usable as a dict key

    # ------------------------------------------------------------------
    # norms and integrals

    def sup_norm_sq(self) -> Fraction:
        return max(v.abs2() for v in self.values.values())

    def sup_norm(self) -> float:
        return float(self.sup_norm_sq()) ** 0.5

    def lip_bound(self, vs: VisualStructure) -> float:
        """2 ||phi||_inf exp(epsilon k), a Lipschitz constant for d_epsilon."""
        import math

        return 2.0 * self.sup_norm() * math.exp(vs.epsilon * self.depth)

    def integral(self) -> GaussianRational:
        m = depth_mass(self.depth, self.group)
        total = QQ_ZERO
        for v in self.values.values():
            total = total + v * m
        return total

    def l2_norm_sq(self) -> Fraction:
        m = depth_mass(self.depth, self.group)
        return sum((v.abs2() * m for v in self.values.values()), Fraction(0))

    # ------------------------------------------------------------------
    # serialization

    def to_json_obj(self) -> dict:
        return {
            "depth": self.depth,
            "values": {
                word_to_str(w): [_frac_str(v.re), _frac_str(v.im)]
                for w, v in self.values.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: dict, group: FreeGroup) -> "LocallyConstantFunction":
        vals = {
            word_from_str(k, group.n): GaussianRational(Fraction(v[0]), Fraction(v[1]))
            for k, v in obj["values"].items()
        }
        return cls(group, obj["depth"], vals)

    @classmethod
    def from_json(cls, text: str, group: FreeGroup) -> "LocallyConstantFunction":
        return cls.from_json_obj(json.loads(text), group)

    def __repr__(self) -> str:
        return f"<LocallyConstantFunction depth={self.depth} on F_{self.group.n}>"


def translate(
    g: Word, phi: LocallyConstantFunction, budget: int = DEFAULT_BUDGET
) -> LocallyConstantFunction:
    """(g.phi)(xi) = phi(g^-1 xi), a level k + |g| function.

    For |u| = k + |g| the cancellation of g^-1 against any point of [u] is
    decided by u alone, and |g^-1 u| >= k, so the depth-k value of phi at
    the reduced product determines g.phi on all of [u].
    """
    if g.is_identity:
        return phi
    d = phi.depth + len(g)
    ginv = g.inverse()
    vals = {
        u: phi.values[mul(ginv, u).prefix(phi.depth)]
        for u in phi.group.sphere(d, budget=budget)
    }
    return LocallyConstantFunction(phi.group, d, vals)


def random_unit_function(
    group: FreeGroup, depth: int, rng: random.Random
) -> LocallyConstantFunction:
    """A random Gaussian-rational function with exact L2(mu) norm 1.

    Rational points on the ellipsoid sum mu_c |z_c|^2 = 1 are produced by
    intersecting a rational line through the constant function 1 (a known
    rational point) with the ellipsoid a second time.
    """
    cells = group.sphere(depth)
    masses = [depth_mass(depth, group)] * len(cells)
    while True:
        direction = [
            GaussianRational(
                Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
            )
            for _ in cells
        ]
        q = sum((d.abs2() * m for d, m in zip(direction, masses)), Fraction(0))
        if q == 0:
            continue
        b = sum((d.re * m for d, m in zip(direction, masses)), Fraction(0))
        t = Fraction(-2) * b / q
        if t == 0:
            continue
        vals = {
            w: QQ_ONE + direction[i] * t for i, w in enumerate(cells)
        }
        phi = LocallyConstantFunction(group, depth, vals)
        assert phi.l2_norm_sq() == 1
        return phi
