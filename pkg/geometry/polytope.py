from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Sequence

from analysis.vectors import FVector
from geometry.exact import LinearFunctional, RVector, affine_rank, integer_vector, nullspace, rank, sign, vector
from geometry.exceptions import DimensionMismatch, DuplicateVertex, InputError, NotFullDimensional, RedundantPoint

logger = logging.getLogger(__name__)

Face = frozenset


@dataclass(frozen=True)
class Facet:
  functional: LinearFunctional
  vertex_set: frozenset[int]

  @property
  def normal(self) -> RVector:
    return self.functional.normal

  @property
  def offset(self) -> Fraction:
    return self.functional.offset


@dataclass(frozen=True)
class VPolytope:
  """A full-dimensional polytope given by its vertex list.

  Vertex order is the canonical indexing used by every face and facet.
  """

  dim: int
  vertices: tuple[RVector, ...]
  name: str = field(default="", compare=False)

  def __post_init__(self):
    if self.dim < 1:
      raise InputError("Dimension must be at least 1")
    for v in self.vertices:
      if len(v) != self.dim:
        raise DimensionMismatch(f"Vertex {v} does not live in R^{self.dim}")
    if len(set(self.vertices)) != len(self.vertices):
      raise DuplicateVertex("The same point was supplied twice as a vertex")

  @classmethod
  def from_points(cls, points: Sequence[Sequence], name: str = "") -> VPolytope:
    verts = tuple(vector(p) for p in points)
    if not verts:
      raise InputError("A polytope needs at least one vertex")
    return cls(len(verts[0]), verts, name)

  @property
  def vertex_count(self) -> int:
    return len(self.vertices)

  def transformed(self, fn: Callable[[Sequence], RVector]) -> VPolytope:
    return VPolytope(self.dim, tuple(fn(v) for v in self.vertices), self.name)

  @cached_property
  def facets(self) -> tuple[Facet, ...]:
    return facet_enumeration(self)

  @cached_property
  def lattice(self) -> FaceLattice:
    return face_lattice(self, self.facets)


def _supporting_functional(points: Sequence[RVector], d: int) -> LinearFunctional | None:
  """Hyperplane through d affinely independent points, or None when they are dependent."""
  rows = [tuple(p) + (Fraction(-1),) for p in points]
  kernel = nullspace(rows, d + 1)
  if len(kernel) != 1:
    return None
  solution = kernel[0]
  if all(a == 0 for a in solution[:d]):
    return None
  scaled = integer_vector(solution)
  return LinearFunctional(tuple(Fraction(a) for a in scaled[:d]), Fraction(scaled[d]))


def facet_enumeration(p: VPolytope) -> tuple[Facet, ...]:
  d, verts = p.dim, p.vertices
  if len(verts) < d + 1 or affine_rank(verts) < d:
    raise NotFullDimensional(f"The points do not span R^{d}")

  found: dict[frozenset[int], Facet] = {}
  for subset in combinations(range(len(verts)), d):
    chosen = frozenset(subset)
    if any(chosen <= known for known in found):
      continue
    functional = _supporting_functional([verts[i] for i in subset], d)
    if functional is None:
      continue
    signs = [sign(functional.value(v)) for v in verts]
    if all(s <= 0 for s in signs):
      oriented = functional
    elif all(s >= 0 for s in signs):
      oriented = functional.negated()
    else:
      continue
    incident = frozenset(i for i, s in enumerate(signs) if s == 0)
    found[incident] = Facet(oriented, incident)

  facets = tuple(sorted(found.values(), key=lambda f: sorted(f.vertex_set)))
  for i in range(len(verts)):
    normals = [f.normal for f in facets if i in f.vertex_set]
    if rank(normals) < d:
      raise RedundantPoint(f"Point {i} is not a vertex of the convex hull")
  logger.debug("Enumerated %d facets of a %d-polytope with %d vertices", len(facets), d, len(verts))
  return facets


def is_simplicial(p: VPolytope) -> bool:
  return all(len(f.vertex_set) == p.dim for f in p.facets)


def negate(p: VPolytope) -> VPolytope:
  name = p.name[1:] if p.name.startswith("-") else f"-{p.name}" if p.name else ""
  return VPolytope(p.dim, tuple(tuple(-a for a in v) for v in p.vertices), name)


@dataclass(frozen=True)
class FaceLattice:
  """Faces of P as vertex-index sets, graded by dimension -1..d."""

  dim: int
  vertex_count: int
  facets: tuple[Facet, ...]
  faces: tuple[tuple[Face, ...], ...]
  dims: dict[Face, int] = field(compare=False, repr=False)
  active: dict[Face, int] = field(compare=False, repr=False)

  def faces_of_dim(self, i: int) -> tuple[Face, ...]:
    if not -1 <= i <= self.dim:
      return ()
    return self.faces[i + 1]

  def dimension_of(self, face: Face) -> int:
    return self.dims[face]

  def active_mask(self, face: Face) -> int:
    """Bit k is set iff facet k contains the face."""
    return self.active[face]

  @cached_property
  def boundary_faces(self) -> tuple[Face, ...]:
    return tuple(f for i in range(self.dim) for f in self.faces_of_dim(i))

  @cached_property
  def _below(self) -> dict[Face, tuple[Face, ...]]:
    below: dict[Face, tuple[Face, ...]] = {}
    for i in range(self.dim + 1):
      lower = self.faces_of_dim(i - 1)
      for face in self.faces_of_dim(i):
        below[face] = tuple(g for g in lower if g < face)
    return below

  def subfaces(self, face: Face) -> tuple[Face, ...]:
    """Faces one dimension lower contained in `face`."""
    return self._below[face]

  def covers(self, i: int) -> tuple[tuple[Face, Face], ...]:
    """Containment pairs between faces of dimension i and i+1."""
    return tuple((low, high) for high in self.faces_of_dim(i + 1) for low in self.faces_of_dim(i) if low <= high)

  def ridges_in_two_facets(self) -> bool:
    return all(bin(self.active[r]).count("1") == 2 for r in self.faces_of_dim(self.dim - 2))

  def euler_relation_holds(self) -> bool:
    counts = [len(self.faces_of_dim(i)) for i in range(self.dim)]
    return sum((-1) ** i * c for i, c in enumerate(counts)) == 1 + (-1) ** (self.dim - 1)


def face_lattice(p: VPolytope, facets: Sequence[Facet] | None = None) -> FaceLattice:
  facets = tuple(p.facets if facets is None else facets)
  d = p.dim
  simplicial = all(len(f.vertex_set) == d for f in facets)

  faces: set[Face] = set()
  if simplicial:
    for facet in facets:
      members = sorted(facet.vertex_set)
      for size in range(1, d + 1):
        faces.update(frozenset(c) for c in combinations(members, size))
  else:
    pending = [f.vertex_set for f in facets]
    faces.update(pending)
    while pending:
      face = pending.pop()
      for facet in facets:
        meet = face & facet.vertex_set
        if meet and meet not in faces:
          faces.add(meet)
          pending.append(meet)

  dims: dict[Face, int] = {frozenset(): -1, frozenset(range(p.vertex_count)): d}
  for face in faces:
    dims[face] = len(face) - 1 if simplicial else affine_rank([p.vertices[i] for i in sorted(face)])

  active: dict[Face, int] = {}
  for face in dims:
    mask = 0
    if len(face) < p.vertex_count:
      for k, facet in enumerate(facets):
        if face <= facet.vertex_set:
          mask |= 1 << k
    active[face] = mask

  graded = tuple(
    tuple(sorted((f for f, fd in dims.items() if fd == i), key=sorted)) for i in range(-1, d + 1)
  )
  return FaceLattice(d, p.vertex_count, facets, graded, dims, active)


def f_vector(lattice: FaceLattice) -> FVector:
  return FVector((1,) + tuple(len(lattice.faces_of_dim(i)) for i in range(lattice.dim)))
