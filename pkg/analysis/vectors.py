"""f, h, g, alpha-hat and gamma-hat vectors and the transforms between them.

Index conventions: f and alpha-hat start at -1, h and gamma-hat at 0, g at 0.
Reading an index outside the stored range yields 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import ClassVar, Sequence

from geometry.exact import format_rational
from geometry.exceptions import DimensionMismatch, InputError


@dataclass(frozen=True)
class IndexedVector:
  entries: tuple
  first_index: ClassVar[int] = 0

  def __post_init__(self):
    pass

  def __getitem__(self, index: int):
    position = index - self.first_index
    if 0 <= position < len(self.entries):
      return self.entries[position]
    return 0

  def __len__(self) -> int:
    return len(self.entries)

  def __iter__(self):
    return iter(self.entries)

  @property
  def last_index(self) -> int:
    return self.first_index + len(self.entries) - 1

  @property
  def indices(self) -> range:
    return range(self.first_index, self.last_index + 1)

  def _same_shape(self, other: IndexedVector):
    if type(other) is not type(self) or len(other) != len(self):
      raise DimensionMismatch(f"Cannot combine {self!r} with {other!r}")

  def __add__(self, other: IndexedVector):
    self._same_shape(other)
    return type(self)(tuple(a + b for a, b in zip(self.entries, other.entries)))

  def __sub__(self, other: IndexedVector):
    self._same_shape(other)
    return type(self)(tuple(a - b for a, b in zip(self.entries, other.entries)))

  def scaled(self, factor):
    return type(self)(tuple(factor * a for a in self.entries))

  def labelled(self) -> str:
    return "  ".join(f"[{i}]={format_rational(self[i])}" for i in self.indices)

  def __str__(self) -> str:
    return "(" + ", ".join(format_rational(a) for a in self.entries) + ")"


class FVector(IndexedVector):
  first_index = -1

  def __post_init__(self):
    if self.entries and self.entries[0] not in (0, 1):
      raise InputError(f"f_-1 must be 0 or 1, got {self.entries[0]}")


class HVector(IndexedVector):
  first_index = 0


class GVector(IndexedVector):
  first_index = 0


class AngleVector(IndexedVector):
  first_index = -1

  def __post_init__(self):
    if self.entries and self.entries[0] != 0:
      raise InputError("alpha-hat_-1 must be 0")


class GammaVector(IndexedVector):
  first_index = 0


def zeros(cls, length: int):
  return cls((0,) * length)


def _binomial_transform(values: Sequence, d: int) -> tuple:
  """Coefficients of sum_i values[i] (t-1)^(d-i) against t^(d-k), k = 0..d."""
  if len(values) != d + 1:
    raise DimensionMismatch(f"Expected {d + 1} entries for d={d}, got {len(values)}")
  return tuple(
    sum(values[i] * comb(d - i, k - i) * (-1) ** (k - i) for i in range(k + 1)) for k in range(d + 1)
  )


def _inverse_binomial_transform(values: Sequence, d: int) -> tuple:
  if len(values) != d + 1:
    raise DimensionMismatch(f"Expected {d + 1} entries for d={d}, got {len(values)}")
  return tuple(sum(values[k] * comb(d - k, i - k) for k in range(i + 1)) for i in range(d + 1))


def h_from_f(f: FVector, d: int) -> HVector:
  return HVector(_binomial_transform(f.entries, d))


def f_from_h(h: HVector, d: int) -> FVector:
  return FVector(_inverse_binomial_transform(h.entries, d))


def g_from_h(h: HVector) -> GVector:
  entries = h.entries
  g = [entries[0]] + [entries[k] - entries[k - 1] for k in range(1, len(entries))] + [-entries[-1]]
  return GVector(tuple(g))


def gamma_from_alpha(alpha: AngleVector, d: int) -> GammaVector:
  if alpha[-1] != 0:
    raise InputError("alpha-hat_-1 must be 0")
  return GammaVector(tuple(Fraction(x) for x in _binomial_transform(alpha.entries, d)))


def alpha_from_gamma(gamma: GammaVector, d: int) -> AngleVector:
  return AngleVector(tuple(Fraction(x) for x in _inverse_binomial_transform(gamma.entries, d)))


# Shape predicates. Ties count both ways.


def is_nondecreasing(values: Sequence) -> bool:
  return all(a <= b for a, b in zip(values, values[1:]))


def is_unimodal(values: Sequence) -> bool:
  values = list(values)
  k = 0
  while k + 1 < len(values) and values[k] <= values[k + 1]:
    k += 1
  return all(a >= b for a, b in zip(values[k:], values[k + 1:]))


def is_palindromic(values: Sequence) -> bool:
  values = list(values)
  return values == values[::-1]
