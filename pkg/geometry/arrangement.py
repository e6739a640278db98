"""Central arrangement of facet hyperplanes and its regions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from geometry.exact import dot, integer_vector, primitive_normal, sign
from geometry.exceptions import BoundaryRayError, DimensionMismatch, InputError
from geometry.polytope import VPolytope

logger = logging.getLogger(__name__)

IntVector = tuple[int, ...]


@dataclass(frozen=True)
class CentralArrangement:
  dim: int
  hyperplanes: tuple[IntVector, ...]
  # Per facet k: (index of its hyperplane, +1 if a_k points along the stored normal else -1).
  source_map: tuple[tuple[int, int], ...] = ()

  @classmethod
  def from_normals(cls, dim: int, normals: Sequence[Sequence]) -> CentralArrangement:
    stored: list[IntVector] = []
    source: list[tuple[int, int]] = []
    for normal in normals:
      if len(normal) != dim:
        raise DimensionMismatch(f"Normal {normal} does not live in R^{dim}")
      canonical = primitive_normal(normal)
      if canonical not in stored:
        stored.append(canonical)
      orientation = 1 if integer_vector(normal) == canonical else -1
      source.append((stored.index(canonical), orientation))
    return cls(dim, tuple(stored), tuple(source))

  @property
  def size(self) -> int:
    return len(self.hyperplanes)

  def facet_signs(self, region: Region) -> tuple[int, ...]:
    """Outward-oriented sign of each facet normal on the region."""
    return tuple(orientation * region.signs[j] for j, orientation in self.source_map)

  def dark_mask(self, region: Region) -> int:
    mask = 0
    for k, s in enumerate(self.facet_signs(region)):
      if s < 0:
        mask |= 1 << k
    return mask

  def parse_key(self, key: str) -> tuple[int, ...]:
    if len(key) != self.size or set(key) - {"+", "-"}:
      raise InputError(f"{key!r} is not a sign string over {self.size} hyperplanes")
    return tuple(1 if c == "+" else -1 for c in key)


@dataclass(frozen=True)
class Region:
  signs: tuple[int, ...]
  witness: IntVector = field(compare=False)

  @property
  def key(self) -> str:
    return "".join("+" if s > 0 else "-" for s in self.signs)

  def __str__(self) -> str:
    return self.key


@lru_cache(maxsize=256)
def build_arrangement(p: VPolytope) -> CentralArrangement:
  return CentralArrangement.from_normals(p.dim, [f.normal for f in p.facets])


def negate_region(region: Region) -> Region:
  return Region(tuple(-s for s in region.signs), tuple(-a for a in region.witness))


def region_of_ray(arr: CentralArrangement, ray: Sequence) -> Region:
  if len(ray) != arr.dim:
    raise DimensionMismatch(f"Ray {ray} does not live in R^{arr.dim}")
  signs = tuple(sign(dot(normal, ray)) for normal in arr.hyperplanes)
  if 0 in signs:
    raise BoundaryRayError(f"Ray {tuple(str(a) for a in ray)} lies on hyperplane {signs.index(0)}")
  return Region(signs, integer_vector(ray))


def _complement_basis(normal: IntVector) -> list[IntVector]:
  """Integer basis of the hyperplane orthogonal to `normal`."""
  pivot = next(i for i, a in enumerate(normal) if a != 0)
  basis = []
  for i in range(len(normal)):
    if i == pivot:
      continue
    v = [0] * len(normal)
    v[i] = normal[pivot]
    v[pivot] = -normal[i]
    basis.append(tuple(v))
  return basis


def _split(center: IntVector, normal: IntVector, placed: Sequence[IntVector]) -> tuple[IntVector, IntVector]:
  """Two witnesses on either side of `normal`, keeping every placed sign of `center`."""
  step = Fraction(1)
  for other in placed:
    along = dot(other, normal)
    if along != 0:
      step = min(step, Fraction(abs(dot(other, center)), 2 * abs(along)))
  plus = tuple(c + step * n for c, n in zip(center, normal))
  minus = tuple(c - step * n for c, n in zip(center, normal))
  return integer_vector(plus), integer_vector(minus)


def _region_witnesses(dim: int, normals: Sequence[IntVector]) -> dict[tuple[int, ...], IntVector]:
  """Regions of a central arrangement keyed by sign sequence, by deletion and restriction.

  Inserting hyperplane H splits exactly the regions that meet H; those are
  found by recursing into the arrangement restricted to H.
  """
  if not normals:
    return {(): (1,) + (0,) * (dim - 1)}
  first = normals[0]
  regions: dict[tuple[int, ...], IntVector] = {(1,): first, (-1,): tuple(-a for a in first)}
  if dim == 1:
    return regions

  for j in range(1, len(normals)):
    normal, placed = normals[j], normals[:j]
    basis = _complement_basis(normal)
    restricted: list[IntVector] = []
    for other in placed:
      canonical = primitive_normal(tuple(dot(b, other) for b in basis))
      if canonical not in restricted:
        restricted.append(canonical)

    cut: dict[tuple[int, ...], IntVector] = {}
    for sub_witness in _region_witnesses(dim - 1, restricted).values():
      lifted = tuple(sum(c * b[i] for c, b in zip(sub_witness, basis)) for i in range(dim))
      cut[tuple(sign(dot(other, lifted)) for other in placed)] = lifted

    grown: dict[tuple[int, ...], IntVector] = {}
    for signs, witness in regions.items():
      if signs in cut:
        plus, minus = _split(cut[signs], normal, placed)
        grown[signs + (1,)] = plus
        grown[signs + (-1,)] = minus
      else:
        grown[signs + (sign(dot(normal, witness)),)] = witness
    regions = grown
  return regions


@lru_cache(maxsize=64)
def enumerate_regions(arr: CentralArrangement) -> tuple[Region, ...]:
  witnesses = _region_witnesses(arr.dim, arr.hyperplanes)
  regions = tuple(sorted((Region(s, w) for s, w in witnesses.items()), key=lambda r: r.key))
  logger.info("Enumerated %d regions of %d hyperplanes in R^%d", len(regions), arr.size, arr.dim)
  return regions
