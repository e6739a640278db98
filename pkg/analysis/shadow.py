"""Dark, bright and shadow-boundary parts of the boundary complex, per region."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from analysis.vectors import FVector, HVector, g_from_h, h_from_f, GVector
from geometry.arrangement import CentralArrangement, Region, build_arrangement
from geometry.conf import setting
from geometry.exact import centroid, dot, integer_vector
from geometry.exceptions import NotSimplicial, PreconditionError, ShellingError
from geometry.polytope import Face, FaceLattice, VPolytope, is_simplicial

logger = logging.getLogger(__name__)


class Flavor(str, enum.Enum):
  DARK = "D"
  BRIGHT = "B"
  SHADOW = "pi"
  DARK_CLOSURE = "D-bar"
  BRIGHT_CLOSURE = "B-bar"

  @property
  def has_empty_face(self) -> bool:
    return self not in (Flavor.DARK, Flavor.BRIGHT)


@dataclass(frozen=True)
class TangentCone:
  active_facets: frozenset[int]


@dataclass(frozen=True)
class RelativeComplex:
  kept: frozenset[Face]
  flavor: Flavor
  lattice: FaceLattice = field(compare=False, repr=False)

  @property
  def facets(self) -> frozenset[Face]:
    """Inclusion-maximal kept faces."""
    return frozenset(f for f in self.kept if not any(f < g for g in self.kept))


@dataclass(frozen=True)
class ShadowDecomposition:
  region: Region
  dark: RelativeComplex
  shadow: RelativeComplex
  bright: RelativeComplex

  @property
  def dark_closure(self) -> RelativeComplex:
    return RelativeComplex(self.dark.kept | self.shadow.kept, Flavor.DARK_CLOSURE, self.dark.lattice)

  @property
  def bright_closure(self) -> RelativeComplex:
    return RelativeComplex(self.bright.kept | self.shadow.kept, Flavor.BRIGHT_CLOSURE, self.bright.lattice)


@dataclass(frozen=True)
class ShellingOrder:
  facet_order: tuple[int, ...]
  split: int


def tangent_active_set(face: Face, lattice: FaceLattice) -> TangentCone:
  if not face:
    raise PreconditionError("The tangent cone of the empty face is not used")
  mask = lattice.active_mask(frozenset(face))
  return TangentCone(frozenset(k for k in range(len(lattice.facets)) if mask >> k & 1))


def is_dark(face: Face, region: Region, p: VPolytope, arr: CentralArrangement | None = None) -> bool:
  arr = arr or build_arrangement(p)
  active = p.lattice.active_mask(frozenset(face))
  return active & ~arr.dark_mask(region) == 0


@lru_cache(maxsize=4096)
def shadow_decomposition(p: VPolytope, region: Region) -> ShadowDecomposition:
  arr = build_arrangement(p)
  lattice = p.lattice
  dark_mask = arr.dark_mask(region)
  dark, bright, shadow = set(), set(), set()
  for face in lattice.boundary_faces:
    active = lattice.active_mask(face)
    if active & ~dark_mask == 0:
      dark.add(face)
    elif active & dark_mask == 0:
      bright.add(face)
    else:
      shadow.add(face)
  return ShadowDecomposition(
    region,
    RelativeComplex(frozenset(dark), Flavor.DARK, lattice),
    RelativeComplex(frozenset(shadow), Flavor.SHADOW, lattice),
    RelativeComplex(frozenset(bright), Flavor.BRIGHT, lattice),
  )


def relative_f_vector(rc: RelativeComplex) -> FVector:
  d = rc.lattice.dim
  counts = [0] * (d + 1)
  for face in rc.kept:
    counts[rc.lattice.dimension_of(face) + 1] += 1
  if rc.flavor.has_empty_face:
    counts[0] = 1
  return FVector(tuple(counts))


def dark_h_vector(rc: RelativeComplex) -> HVector:
  """h-vector of a relative complex inside the boundary of a d-polytope."""
  return h_from_f(relative_f_vector(rc), rc.lattice.dim)


def shadow_g_vector(rc: RelativeComplex) -> GVector:
  """g-vector of the shadow boundary, a (d-2)-dimensional complex."""
  d = rc.lattice.dim
  f = relative_f_vector(rc)
  return g_from_h(h_from_f(FVector(f.entries[:d]), d - 1))


# Line shellings.


def _hitting_order(p: VPolytope, direction) -> tuple[list[int], list[int]] | None:
  center = centroid(p.vertices)
  bright, dark = [], []
  for k, facet in enumerate(p.facets):
    slope = dot(facet.normal, direction)
    t = (facet.offset - dot(facet.normal, center)) / slope
    (bright if slope > 0 else dark).append((t, k))
  for group in (bright, dark):
    times = [t for t, _ in group]
    if len(set(times)) != len(times):
      return None
  return [k for _, k in sorted(bright)], [k for _, k in sorted(dark)]


def _nudged(region: Region, arr: CentralArrangement, attempt: int) -> tuple:
  d = arr.dim
  secondary = tuple(((attempt + 1) * (i + 3)) % 7 - 3 for i in range(d))
  if all(a == 0 for a in secondary):
    secondary = (1,) + (0,) * (d - 1)
  step = Fraction(1, attempt + 2)
  for normal in arr.hyperplanes:
    along = dot(normal, secondary)
    if along != 0:
      step = min(step, Fraction(abs(dot(normal, region.witness)), 2 * abs(along)))
  return integer_vector(tuple(w + step * s for w, s in zip(region.witness, secondary)))


def line_shelling(p: VPolytope, region: Region, attempts: int | None = None) -> ShellingOrder:
  """Shell the bright facets first along a line in direction of the region's witness."""
  if not is_simplicial(p):
    raise NotSimplicial("Line shellings are only validated for simplicial polytopes")
  attempts = setting("SHELLING_ATTEMPTS") if attempts is None else attempts
  arr = build_arrangement(p)
  direction = region.witness
  for attempt in range(attempts + 1):
    order = _hitting_order(p, direction)
    if order is not None:
      bright, dark = order
      shelling = ShellingOrder(tuple(bright + dark), len(bright))
      validate_shelling(p, shelling.facet_order)
      return shelling
    logger.warning("Tie in line-shelling parameters for region %s, perturbing (attempt %d)", region.key, attempt + 1)
    direction = _nudged(region, arr, attempt)
  raise ShellingError(f"No generic line found in region {region.key} after {attempts} perturbations")


def _ridge_counts(p: VPolytope, facet_order: tuple[int, ...]) -> list[int]:
  """Number of ridges each facet shares with the earlier ones, checking the shelling condition."""
  if sorted(facet_order) != list(range(len(p.facets))):
    raise ShellingError("A shelling must list every facet exactly once")
  d = p.dim
  sets = [p.facets[k].vertex_set for k in facet_order]
  counts = [0]
  for position in range(1, len(sets)):
    meets = [sets[position] & earlier for earlier in sets[:position]]
    ridges = {m for m in meets if len(m) == d - 1}
    if not ridges:
      raise ShellingError(f"Facet {facet_order[position]} meets the earlier facets in no ridge")
    if any(not any(m <= r for r in ridges) for m in meets):
      raise ShellingError(f"Facet {facet_order[position]} meets the earlier facets in a non-pure complex")
    counts.append(len(ridges))
  return counts


def _tally(counts, d: int) -> HVector:
  h = [0] * (d + 1)
  for c in counts:
    h[c] += 1
  return HVector(tuple(h))


def validate_shelling(p: VPolytope, facet_order: tuple[int, ...]) -> HVector:
  """Check the shelling condition for every prefix; return the h-vector it counts."""
  return _tally(_ridge_counts(p, facet_order), p.dim)


def shelling_dark_h_vector(p: VPolytope, shelling: ShellingOrder) -> HVector:
  """h-vector of the dark part, counted from the facets after the split."""
  return _tally(_ridge_counts(p, shelling.facet_order)[shelling.split:], p.dim)


def ball_dehn_sommerville_check(p: VPolytope, region: Region) -> bool:
  if not is_simplicial(p):
    raise NotSimplicial("Ball Dehn-Sommerville relations need a simplicial polytope")
  d = p.dim
  parts = shadow_decomposition(p, region)
  pairs = ((parts.dark, parts.dark_closure), (parts.bright, parts.bright_closure))
  for open_part, closed_part in pairs:
    h_open, h_closed = dark_h_vector(open_part), dark_h_vector(closed_part)
    if any(h_open[i] != h_closed[d - i] for i in range(d + 1)):
      return False
  return True
