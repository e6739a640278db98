"""Exact rational plumbing: vectors, hyperplanes, linear and projective maps."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import TYPE_CHECKING, Iterable, Sequence

from flint import fmpq, fmpq_mat

from geometry.exceptions import DimensionMismatch, InputError, SingularMapError, ZeroVectorError

if TYPE_CHECKING:
  from geometry.polytope import VPolytope

RVector = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def to_rational(value) -> Fraction:
  """Accept an int, a Fraction or a `p/q` / decimal-integer string."""
  if isinstance(value, bool):
    raise InputError(f"Expected a rational number, got {value!r}")
  if isinstance(value, Fraction):
    return value
  if isinstance(value, int):
    return Fraction(value)
  if isinstance(value, str) and _RATIONAL_RE.match(value.strip()):
    numerator, _, denominator = value.strip().partition("/")
    if denominator and int(denominator) == 0:
      raise InputError(f"Zero denominator in {value!r}")
    return Fraction(int(numerator), int(denominator or 1))
  raise InputError(f"Expected a rational number, got {value!r}")


def format_rational(value: Fraction | int) -> str:
  value = Fraction(value)
  if value.denominator == 1:
    return str(value.numerator)
  return f"{value.numerator}/{value.denominator}"


def vector(values: Iterable) -> RVector:
  return tuple(to_rational(v) for v in values)


def dot(u: Sequence, v: Sequence):
  if len(u) != len(v):
    raise DimensionMismatch(f"Cannot pair vectors of length {len(u)} and {len(v)}")
  return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence, v: Sequence) -> RVector:
  return tuple(Fraction(a) + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> RVector:
  return tuple(Fraction(a) - b for a, b in zip(u, v))


def scale(c, u: Sequence) -> RVector:
  return tuple(Fraction(c) * a for a in u)


def neg(u: Sequence) -> tuple:
  return tuple(-a for a in u)


def sign(value) -> int:
  return (value > 0) - (value < 0)


def is_zero(u: Sequence) -> bool:
  return all(a == 0 for a in u)


def centroid(points: Sequence[Sequence]) -> RVector:
  if not points:
    raise InputError("Centroid of an empty point set")
  n = len(points)
  return tuple(sum((Fraction(p[i]) for p in points), Fraction(0)) / n for i in range(len(points[0])))


def integer_vector(u: Sequence) -> tuple[int, ...]:
  """Positive multiple of `u` with coprime integer coordinates."""
  if is_zero(u):
    raise ZeroVectorError("The zero vector has no primitive multiple")
  fractions = [Fraction(a) for a in u]
  common = lcm(*(f.denominator for f in fractions))
  ints = [int(f * common) for f in fractions]
  divisor = gcd(*ints)
  return tuple(a // divisor for a in ints)


def primitive_normal(u: Sequence) -> tuple[int, ...]:
  """Canonical representative of the line through `u`: integer, coprime, first nonzero entry positive."""
  ints = integer_vector(u)
  first = next(a for a in ints if a != 0)
  return ints if first > 0 else neg(ints)


@dataclass(frozen=True)
class LinearFunctional:
  """The affine function x -> <normal, x> - offset; the hyperplane is its zero set."""

  normal: RVector
  offset: Fraction = Fraction(0)

  def __post_init__(self):
    if is_zero(self.normal):
      raise ZeroVectorError("A hyperplane needs a nonzero normal")

  @property
  def dim(self) -> int:
    return len(self.normal)

  def value(self, point: Sequence) -> Fraction:
    if len(point) != self.dim:
      raise DimensionMismatch(f"Point of dimension {len(point)} against a functional on R^{self.dim}")
    return dot(self.normal, point) - self.offset

  def negated(self) -> LinearFunctional:
    return LinearFunctional(neg(self.normal), -self.offset)


def sign_eval(functional: LinearFunctional, point: Sequence) -> int:
  return sign(functional.value(point))


# Linear algebra over Q, delegated to FLINT.


def _fmpq(value) -> fmpq:
  value = Fraction(value)
  return fmpq(value.numerator, value.denominator)


def _fraction(value: fmpq) -> Fraction:
  return Fraction(int(value.p), int(value.q))


def rational_matrix(rows: Sequence[Sequence], ncols: int | None = None) -> fmpq_mat:
  if ncols is None:
    ncols = len(rows[0]) if rows else 0
  return fmpq_mat(len(rows), ncols, [_fmpq(a) for row in rows for a in row])


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
  m = rational_matrix(rows, ncols)
  reduced, r = m.rref()
  matrix = [[_fraction(reduced[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]
  pivots = [next(j for j, a in enumerate(matrix[i]) if a != 0) for i in range(r)]
  return matrix, pivots


def rank(rows: Sequence[Sequence]) -> int:
  if not rows:
    return 0
  return rational_matrix(rows).rref()[1]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[RVector]:
  """Basis of {x : rows . x = 0}."""
  if not rows:
    return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
  matrix, pivots = rref(rows, ncols)
  free = [c for c in range(ncols) if c not in pivots]
  basis = []
  for f in free:
    x = [Fraction(0)] * ncols
    x[f] = Fraction(1)
    for r, p in enumerate(pivots):
      x[p] = -matrix[r][f]
    basis.append(tuple(x))
  return basis


def affine_rank(points: Sequence[Sequence]) -> int:
  if len(points) <= 1:
    return 0
  base = points[0]
  return rank([sub(p, base) for p in points[1:]])


def determinant(rows: Sequence[Sequence]) -> Fraction:
  if not rows:
    return Fraction(1)
  return _fraction(rational_matrix(rows).det())


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[RVector, ...]:
  columns = list(zip(*b))
  return tuple(tuple(dot(row, col) for col in columns) for row in a)


def identity(n: int) -> tuple[RVector, ...]:
  return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class SquareMap:
  """Invertible linear map x -> M x."""

  entries: tuple[RVector, ...]

  def __post_init__(self):
    n = len(self.entries)
    if any(len(row) != n for row in self.entries):
      raise DimensionMismatch("A linear map needs a square matrix")
    if determinant(self.entries) == 0:
      raise SingularMapError("The matrix is singular")

  @classmethod
  def diagonal(cls, values: Sequence) -> SquareMap:
    n = len(values)
    return cls(tuple(tuple(Fraction(values[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n)))

  @property
  def dim(self) -> int:
    return len(self.entries)

  def apply(self, point: Sequence) -> RVector:
    if len(point) != self.dim:
      raise DimensionMismatch(f"Point of dimension {len(point)} against a map on R^{self.dim}")
    return tuple(dot(row, point) for row in self.entries)


@dataclass(frozen=True)
class ProjectiveMap:
  """Projective transformation acting on homogeneous coordinates (x, 1).

  Admissible for a point set when the last homogeneous coordinate stays
  positive on all of it.
  """

  entries: tuple[RVector, ...]

  def __post_init__(self):
    n = len(self.entries)
    if n < 2 or any(len(row) != n for row in self.entries):
      raise DimensionMismatch("A projective map needs a square matrix of size at least 2")
    if determinant(self.entries) == 0:
      raise SingularMapError("The matrix is singular")

  @classmethod
  def translation(cls, shift: Sequence) -> ProjectiveMap:
    d = len(shift)
    rows = [list(row) for row in identity(d + 1)]
    for i in range(d):
      rows[i][d] = Fraction(shift[i])
    return cls(tuple(tuple(row) for row in rows))

  @classmethod
  def hyperplane_to_infinity(cls, w: Sequence) -> ProjectiveMap:
    """x -> x / (1 - <w, x>): sends the hyperplane <w, x> = 1 to infinity."""
    d = len(w)
    rows = [list(row) for row in identity(d + 1)]
    rows[d] = [-Fraction(a) for a in w] + [Fraction(1)]
    return cls(tuple(tuple(row) for row in rows))

  @property
  def dim(self) -> int:
    return len(self.entries) - 1

  def compose(self, first: ProjectiveMap) -> ProjectiveMap:
    """The map applying `first`, then self."""
    return ProjectiveMap(matmul(self.entries, first.entries))

  def denominator(self, point: Sequence) -> Fraction:
    return dot(self.entries[-1], tuple(point) + (Fraction(1),))

  def apply(self, point: Sequence) -> RVector:
    if len(point) != self.dim:
      raise DimensionMismatch(f"Point of dimension {len(point)} against a map on R^{self.dim}")
    homogeneous = tuple(point) + (Fraction(1),)
    image = tuple(dot(row, homogeneous) for row in self.entries)
    if image[-1] <= 0:
      raise SingularMapError("The projective map is not admissible at this point")
    return tuple(a / image[-1] for a in image[:-1])


def apply_map(transform: SquareMap | ProjectiveMap, polytope: VPolytope) -> VPolytope:
  if transform.dim != polytope.dim:
    raise DimensionMismatch(f"Map on R^{transform.dim} applied to a polytope in R^{polytope.dim}")
  return polytope.transformed(transform.apply)


