"""Deterministic, seed-indexed random generation of series and sample points.

Every draw is a pure function of ``(seed, index)``, so parallel consumers can
partition index ranges and still reproduce a run bit-for-bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .series import FieldElement, ValueGroupElement

Rational = Union[int, Fraction]

_MIX = 0x9E3779B97F4A7C15


def _rng(seed: int, index: int) -> random.Random:
    return random.Random(((seed * _MIX) ^ (index * 0xBF58476D1CE4E5B9)) & 0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class SampleConfig:
    """Reproducible sampling parameters; identical config => identical sequence."""

    seed: int
    samples: int = 2000
    structured_fraction: Fraction = Fraction(1, 4)
    coefficient_bound: int = 12
    exponent_bound: Fraction = Fraction(4)

    def with_seed(self, seed: int) -> "SampleConfig":
        return SampleConfig(seed, self.samples, self.structured_fraction,
                            self.coefficient_bound, self.exponent_bound)


def _random_rational(rng: random.Random, bound: int, nonzero=False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if q != 0 or not nonzero:
            return q


def _random_exponent(rng: random.Random, low: Fraction, high: Fraction) -> Fraction:
    # Exponents with denominator 1 or 2, in [low, high].
    den = rng.choice((1, 1, 2))
    lo = int(low * den)
    hi = int(high * den)
    if hi < lo:
        hi = lo
    return Fraction(rng.randint(lo, hi), den)


def random_element(rng: random.Random, config: SampleConfig, min_valuation: Fraction = Fraction(0)) -> FieldElement:
    """One exact series with valuation >= min_valuation (or exact zero).

    The kind mix guarantees units with random rational residues, elements of
    strictly positive valuation, and exact rationals all occur.
    """
    bound = config.coefficient_bound
    kind = rng.randrange(8)
    if kind == 0:
        body = FieldElement.from_rational(_random_rational(rng, bound))  # may be 0
    elif kind in (1, 2, 3):
        terms = [(Fraction(0), _random_rational(rng, bound, nonzero=True))]
        for _ in range(rng.randrange(3)):
            terms.append((_random_exponent(rng, Fraction(1, 2), config.exponent_bound),
                          _random_rational(rng, bound, nonzero=True)))
        body = FieldElement(terms)
    elif kind == 4:
        lead = _random_exponent(rng, Fraction(1, 2), config.exponent_bound)
        terms = [(lead, _random_rational(rng, bound, nonzero=True))]
        for _ in range(rng.randrange(2)):
            terms.append((lead + _random_exponent(rng, Fraction(1, 2), Fraction(2)),
                          _random_rational(rng, bound, nonzero=True)))
        body = FieldElement(terms)
    else:
        terms = []
        for _ in range(rng.randrange(1, 4)):
            terms.append((_random_exponent(rng, Fraction(0), config.exponent_bound),
                          _random_rational(rng, bound, nonzero=True)))
        body = FieldElement(terms)
    if min_valuation == 0:
        return body
    return body * FieldElement.eps_power(min_valuation)


def random_positive_element(rng: random.Random, config: SampleConfig) -> FieldElement:
    """An exact element that is strictly positive in the field order."""
    while True:
        x = random_element(rng, config, Fraction(0))
        if x.is_exact_zero():
            continue
        e0, c0 = x.leading()
        if c0 < 0:
            x = -x
        return x


def sample_ball(n: int, radius: Union[ValueGroupElement, Rational], config: SampleConfig,
                start_index: int = 0) -> list[FieldElement]:
    """n deterministic series with valuation >= radius."""
    if isinstance(radius, ValueGroupElement):
        if radius.is_top:
            raise ValueError("radius must be a rational value")
        radius = radius.value
    radius = Fraction(radius)
    out = []
    for i in range(n):
        rng = _rng(config.seed, start_index + i)
        out.append(random_element(rng, config, radius))
    return out


def generic_residue_point(rng: random.Random, n: int, pool_size: int) -> list[FieldElement]:
    """A point whose coordinates are nonzero rationals from a large finite pool.

    Large pools make residue-level coincidences (vanishing of a fixed nonzero
    residue polynomial) improbable.
    """
    coords = []
    for _ in range(n):
        num = rng.randint(1, max(2, pool_size))
        den = rng.choice((1, 1, 2, 3, 5, 7))
        coords.append(FieldElement.from_rational(Fraction(num, den)))
    return coords
