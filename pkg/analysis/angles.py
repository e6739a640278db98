"""Cone-angle models and their weights on the regions of one arrangement."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from geometry.arrangement import CentralArrangement, Region, enumerate_regions, negate_region, region_of_ray
from geometry.conf import setting
from geometry.exact import RVector, dot, is_zero, sign, vector
from geometry.exceptions import ApproximateModelError, DimensionMismatch, WeightError, ZeroVectorError
from geometry.polytope import Face, VPolytope

logger = logging.getLogger(__name__)

_BATCH = 1 << 16


@dataclass(frozen=True)
class Atom:
  ray: RVector
  weight: Fraction


@dataclass(frozen=True)
class PointMasses:
  atoms: tuple[Atom, ...]

  def __post_init__(self):
    if not self.atoms:
      raise WeightError("A point-mass model needs at least one atom")
    for atom in self.atoms:
      if is_zero(atom.ray):
        raise ZeroVectorError("Point-mass rays must be nonzero")
    _check_distribution([a.weight for a in self.atoms])

  @classmethod
  def of(cls, pairs: Sequence[tuple[Sequence, object]]) -> PointMasses:
    return cls(tuple(Atom(vector(ray), Fraction(weight)) for ray, weight in pairs))


@dataclass(frozen=True)
class RegionWeights:
  """Weights keyed by region sign strings; omitted regions weigh 0."""

  weights: tuple[tuple[str, Fraction], ...]

  def __post_init__(self):
    keys = [k for k, _ in self.weights]
    if len(set(keys)) != len(keys):
      raise WeightError("A region key appears twice")
    _check_distribution([w for _, w in self.weights])

  @classmethod
  def of(cls, mapping: dict[str, object]) -> RegionWeights:
    return cls(tuple(sorted((k, Fraction(w)) for k, w in mapping.items())))

  def as_dict(self) -> dict[str, Fraction]:
    return dict(self.weights)


@dataclass(frozen=True)
class SphericalMC:
  samples: int
  seed: int
  workers: int = 1

  def __post_init__(self):
    if self.samples < 1 or self.workers < 1:
      raise WeightError("Monte-Carlo sampling needs positive sample and worker counts")


AngleModel = Union[PointMasses, RegionWeights, SphericalMC]


@dataclass(frozen=True)
class RegionWeightVector:
  """Weights of the regions with positive weight, in a fixed order."""

  entries: tuple[tuple[Region, Fraction], ...]
  estimated: bool = False
  samples: int | None = None
  seed: int | None = field(default=None)

  def __iter__(self):
    return iter(self.entries)

  def __len__(self) -> int:
    return len(self.entries)

  @property
  def regions(self) -> tuple[Region, ...]:
    return tuple(r for r, _ in self.entries)

  def weight_of(self, region: Region) -> Fraction:
    return self.as_dict().get(region, Fraction(0))

  def as_dict(self) -> dict[Region, Fraction]:
    return dict(self.entries)

  def total(self) -> Fraction:
    return sum((w for _, w in self.entries), Fraction(0))


def _check_distribution(weights: Sequence[Fraction]):
  if any(w < 0 for w in weights):
    raise WeightError("Weights must be non-negative")
  if sum(weights, Fraction(0)) != 1:
    raise WeightError(f"Weights sum to {sum(weights, Fraction(0))}, not 1")


def _weight_vector(accumulated: dict[Region, Fraction], **flags) -> RegionWeightVector:
  entries = tuple(sorted(((r, w) for r, w in accumulated.items() if w != 0), key=lambda item: item[0].key))
  return RegionWeightVector(entries, **flags)


def evaluate(model: AngleModel, arr: CentralArrangement, regions: Sequence[Region] | None = None) -> RegionWeightVector:
  if isinstance(model, PointMasses):
    accumulated: dict[Region, Fraction] = {}
    for atom in model.atoms:
      if len(atom.ray) != arr.dim:
        raise DimensionMismatch(f"Atom ray {atom.ray} does not live in R^{arr.dim}")
      region = region_of_ray(arr, atom.ray)
      accumulated[region] = accumulated.get(region, Fraction(0)) + atom.weight
    return _weight_vector(accumulated)

  if isinstance(model, RegionWeights):
    known = {r.signs: r for r in (regions if regions is not None else enumerate_regions(arr))}
    accumulated = {}
    for key, weight in model.weights:
      signs = arr.parse_key(key)
      if signs not in known:
        raise WeightError(f"{key} is not a region of the arrangement")
      accumulated[known[signs]] = weight
    return _weight_vector(accumulated)

  if isinstance(model, SphericalMC):
    counts, witnesses = _sample_counts(arr, model.samples, model.seed, model.workers)
    accumulated = {Region(signs, witnesses[signs]): Fraction(count, model.samples) for signs, count in counts.items()}
    return _weight_vector(accumulated, estimated=True, samples=model.samples, seed=model.seed)

  raise WeightError(f"Unknown angle model {model!r}")


def _sample_substream(normals: np.ndarray, dim: int, quota: int, seed_seq: np.random.SeedSequence, bits: int):
  rng = np.random.Generator(np.random.Philox(seed_seq))
  counts: Counter = Counter()
  witnesses: dict[tuple[int, ...], tuple[int, ...]] = {}
  remaining = quota
  while remaining:
    draws = rng.standard_normal((min(remaining, _BATCH), dim))
    directions = draws / np.linalg.norm(draws, axis=1, keepdims=True)
    scaled = np.rint(directions * (1 << bits)).astype(np.int64)
    if normals.dtype == object:
      scaled = scaled.astype(object)
    products = scaled @ normals.T
    interior = np.all(products != 0, axis=1)
    inside = products[interior]
    signs = (inside > 0).astype(np.int8) - (inside < 0).astype(np.int8)
    rows, first, tally = np.unique(signs, axis=0, return_index=True, return_counts=True)
    kept = scaled[interior]
    for row, index, count in zip(rows, first, tally):
      key = tuple(int(s) for s in row)
      counts[key] += int(count)
      witnesses.setdefault(key, tuple(int(a) for a in kept[index]))
    remaining -= int(interior.sum())
  return counts, witnesses


def _sample_counts(arr: CentralArrangement, samples: int, seed: int, workers: int) -> tuple[Counter, dict]:
  """Region sign counts of `samples` seeded directions; hyperplane hits are redrawn."""
  bits = setting("MC_SCALE_BITS")
  bound = max((abs(a) for n in arr.hyperplanes for a in n), default=1) * arr.dim * (1 << bits)
  dtype = np.int64 if bound < (1 << 62) else object
  normals = np.array(arr.hyperplanes, dtype=dtype).reshape(arr.size, arr.dim)
  children = np.random.SeedSequence(seed).spawn(workers)
  quotas = [samples // workers + (i < samples % workers) for i in range(workers)]

  with ThreadPoolExecutor(max_workers=workers) as pool:
    parts = list(pool.map(lambda job: _sample_substream(normals, arr.dim, job[0], job[1], bits), zip(quotas, children)))

  counts: Counter = Counter()
  witnesses: dict[tuple[int, ...], tuple[int, ...]] = {}
  for part_counts, part_witnesses in parts:
    counts.update(part_counts)
    for key, witness in part_witnesses.items():
      witnesses.setdefault(key, witness)
  logger.info("Sampled %d directions over %d regions (seed %d, %d workers)", samples, len(counts), seed, workers)
  return counts, witnesses


def mirror(model: AngleModel) -> AngleModel:
  if isinstance(model, PointMasses):
    return PointMasses(tuple(Atom(tuple(-a for a in atom.ray), atom.weight) for atom in model.atoms))
  if isinstance(model, RegionWeights):
    flip = str.maketrans("+-", "-+")
    return RegionWeights(tuple(sorted((k.translate(flip), w) for k, w in model.weights)))
  raise ApproximateModelError("The spherical measure is already even; mirroring applies to exact models only")


def is_even_on(model: AngleModel, arr: CentralArrangement) -> bool:
  if isinstance(model, SphericalMC):
    raise ApproximateModelError("Evenness of a Monte-Carlo estimate cannot be decided exactly")
  weights = evaluate(model, arr)
  return all(weights.weight_of(negate_region(r)) == w for r, w in weights)


def tangent_cone_measure(model: PointMasses, polytope: VPolytope, face: Face) -> Fraction:
  """Total weight of the atoms lying in the tangent cone of `face`."""
  facets = [f for f in polytope.facets if frozenset(face) <= f.vertex_set]
  total = Fraction(0)
  for atom in model.atoms:
    if all(sign(dot(f.normal, atom.ray)) <= 0 for f in facets):
      total += atom.weight
  return total
