"""Random instances, flattening, projective search and verification campaigns."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from analysis.angles import AngleModel, Atom, PointMasses, RegionWeights, SphericalMC, evaluate
from analysis.anglevec import AnalysisReport, analyze_weights, gamma_hat
from analysis.codec import dump_polytope, plain
from analysis.vectors import GammaVector, is_unimodal
from geometry.arrangement import Region, build_arrangement, enumerate_regions, negate_region, region_of_ray
from geometry.conf import setting
from geometry.exact import (
  ProjectiveMap,
  SquareMap,
  apply_map,
  centroid,
  determinant,
  dot,
  neg,
  sub,
)
from geometry.exceptions import (
  AnglevecError,
  BoundaryRayError,
  CheckFailure,
  DuplicateVertex,
  NotFullDimensional,
  NotSimplicial,
  PreconditionError,
  RedundantPoint,
  SearchExhausted,
  SingularMapError,
)
from geometry.polytope import VPolytope, is_simplicial

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
  NON_UNIMODAL = "non-unimodal"
  ONE_DARK_FACET = "one-dark-facet-projective"
  RANDOM_VERIFY = "random-verify"
  FLATTEN = "flatten"


@dataclass(frozen=True)
class SearchConfig:
  dim: int
  vertices: int
  seed: int
  max_iter: int
  mode: Mode = Mode.RANDOM_VERIFY

  def __post_init__(self):
    if self.dim < 2:
      raise PreconditionError("Searches need dimension at least 2")
    if self.vertices < self.dim + 1:
      raise PreconditionError(f"A {self.dim}-polytope needs at least {self.dim + 1} vertices")
    if self.max_iter < 0:
      raise PreconditionError("max_iter must be non-negative")


# Random simplicial polytopes.


def _in_general_position(points: Sequence[tuple[int, ...]], d: int) -> bool:
  for subset in combinations(points, d + 1):
    base = subset[0]
    if determinant([sub(q, base) for q in subset[1:]]) == 0:
      return False
  return True


def random_simplicial_polytope(d: int, n: int, seed: int) -> VPolytope:
  """n integer points drawn from a box, in general position, all of them vertices."""
  if d < 1 or n < d + 1:
    raise PreconditionError(f"Need at least {d + 1} points for a {d}-polytope, got {n}")
  rng = np.random.default_rng(seed)
  half = max(setting("BOX_SIDE") // 2, d + 1)
  retries = setting("RANDOM_RETRIES")
  for attempt in range(retries):
    draw = rng.integers(-half, half, size=(n, d), endpoint=True)
    points = [tuple(int(a) for a in row) for row in draw]
    if len(set(points)) != n or not _in_general_position(points, d):
      logger.warning("Degenerate random draw (d=%d, n=%d, seed %d, attempt %d), redrawing", d, n, seed, attempt + 1)
      continue
    try:
      p = VPolytope.from_points(points, name=f"random-d{d}-n{n}-s{seed}")
      if is_simplicial(p):
        return p
    except (RedundantPoint, NotFullDimensional, DuplicateVertex):
      logger.warning("Random draw has a non-vertex point (seed %d, attempt %d), redrawing", seed, attempt + 1)
  raise SearchExhausted(f"No simplicial {d}-polytope with {n} vertices after {retries} draws", seed=seed)


# Flattening.


def combinatorics_preserved(p: VPolytope, q: VPolytope) -> bool:
  """Same vertex count and the same facets as vertex-index sets."""
  if p.vertex_count != q.vertex_count:
    return False
  return {f.vertex_set for f in p.facets} == {f.vertex_set for f in q.facets}


def flatten(p: VPolytope, eps, axis: int = 0) -> VPolytope:
  eps = Fraction(eps)
  if not 0 < eps <= 1:
    raise PreconditionError(f"Flattening factor {eps} is outside (0, 1]")
  if not 0 <= axis < p.dim:
    raise PreconditionError(f"Axis {axis} out of range for dimension {p.dim}")
  squeeze = SquareMap.diagonal([eps if i == axis else 1 for i in range(p.dim)])
  flat = apply_map(squeeze, p)
  if not combinatorics_preserved(p, flat):
    raise SingularMapError(f"Flattening by {eps} changed the face lattice")
  return flat


@dataclass(frozen=True)
class FlatteningStep:
  eps: Fraction
  gamma_hat: GammaVector
  estimated: bool


@dataclass(frozen=True)
class FlatteningExperiment:
  steps: tuple[FlatteningStep, ...]
  reference: GammaVector | None

  @property
  def closer_to(self) -> str | None:
    """Whether the last measurement sits nearer gamma-hat or twice gamma-hat of the reference model."""
    if self.reference is None or not self.steps:
      return None
    last = self.steps[-1].gamma_hat
    single = sum(abs(a - b) for a, b in zip(last, self.reference))
    double = sum(abs(a - 2 * b) for a, b in zip(last, self.reference))
    return "gamma_hat" if single <= double else "double_gamma_hat"


def flattening_experiment(
  p: VPolytope,
  eps_values: Sequence,
  model: AngleModel,
  axis: int = 0,
  reference: AngleModel | None = None,
) -> FlatteningExperiment:
  steps = []
  for eps in eps_values:
    flat = flatten(p, eps, axis)
    weights = evaluate(model, build_arrangement(flat))
    steps.append(FlatteningStep(Fraction(eps), gamma_hat(flat, weights), weights.estimated))
    logger.info("Flattened by %s: gamma-hat %s", eps, steps[-1].gamma_hat)
  ref = gamma_hat(p, evaluate(reference, build_arrangement(p))) if reference is not None else None
  return FlatteningExperiment(tuple(steps), ref)


# Projective search for a region with a single dark facet.


@dataclass(frozen=True)
class OneDarkFacet:
  polytope: VPolytope
  region: Region
  transform: ProjectiveMap | None
  iterations: int

  @property
  def antipode(self) -> Region:
    return negate_region(self.region)


def _dark_count(region: Region, p: VPolytope) -> int:
  return bin(build_arrangement(p).dark_mask(region)).count("1")


def _one_dark_region(p: VPolytope, regions: Sequence[Region]) -> Region | None:
  return next((r for r in regions if _dark_count(r, p) == 1), None)


def _push_beyond_facet(p: VPolytope, rng: np.random.Generator) -> tuple[ProjectiveMap, tuple] | None:
  """A projective map sending a point beyond exactly one facet to infinity."""
  center = centroid(p.vertices)
  to_center = ProjectiveMap.translation(neg(center))
  offsets = [f.offset - dot(f.normal, center) for f in p.facets]
  k = int(rng.integers(len(p.facets)))
  facet = p.facets[k]
  mid = centroid([sub(p.vertices[i], center) for i in sorted(facet.vertex_set)])

  bound = None
  for j, other in enumerate(p.facets):
    if j == k:
      continue
    along = dot(other.normal, facet.normal)
    if along > 0:
      room = (offsets[j] - dot(other.normal, mid)) / along
      bound = room if bound is None else min(bound, room)
  eps = Fraction(_randint(rng, 1, 9), 10) * (bound if bound is not None else 1)
  point = tuple(m + eps * a for m, a in zip(mid, facet.normal))

  reach = dot(facet.normal, point)
  if reach <= 0:
    return None
  w = tuple(a / reach for a in facet.normal)
  return ProjectiveMap.hyperplane_to_infinity(w).compose(to_center), point


def projective_one_dark_facet_search(p: VPolytope, seed: int, max_iter: int) -> OneDarkFacet:
  """Find a projective image of P with a region that has exactly one dark facet.

  The first iteration tries P itself; later ones push a random point just
  beyond one facet to infinity and look at the regions of its direction.
  """
  if not is_simplicial(p):
    raise NotSimplicial("The one-dark-facet search needs a simplicial polytope")
  rng = np.random.default_rng(seed)
  best = None

  for iteration in range(1, max_iter + 1):
    if iteration == 1:
      arr = build_arrangement(p)
      if arr.size <= setting("ENUMERATION_LIMIT"):
        regions = enumerate_regions(arr)
        found = _one_dark_region(p, regions)
        best = min((_dark_count(r, p) for r in regions), default=best)
        if found is not None:
          logger.info("%s already has a one-dark-facet region %s", p.name or "polytope", found.key)
          return OneDarkFacet(p, found, None, iteration)
        continue

    pushed = _push_beyond_facet(p, rng)
    if pushed is None:
      continue
    transform, point = pushed
    try:
      image = apply_map(transform, p)
      preserved = combinatorics_preserved(p, image)
    except (SingularMapError, RedundantPoint, NotFullDimensional, DuplicateVertex):
      logger.debug("Projective image degenerate at iteration %d", iteration)
      continue
    if not preserved:
      logger.debug("Projective image changed the face lattice at iteration %d", iteration)
      continue
    try:
      region = region_of_ray(build_arrangement(image), point)
    except BoundaryRayError:
      continue
    candidates = (region, negate_region(region))
    counts = [_dark_count(r, image) for r in candidates]
    best = min(counts + ([best] if best is not None else []))
    if 1 in counts:
      found = candidates[counts.index(1)]
      image = VPolytope(image.dim, image.vertices, f"{p.name}-projective" if p.name else "projective")
      logger.info("One-dark-facet region %s found after %d iterations", found.key, iteration)
      return OneDarkFacet(image, found, transform, iteration)

  raise SearchExhausted(
    f"No one-dark-facet region within {max_iter} iterations",
    iterations=max_iter,
    best_dark_count=best,
  )


# Campaigns.


@dataclass(frozen=True)
class Finding:
  iteration: int
  seed: int
  polytope: VPolytope
  weights: dict
  gamma_hat: GammaVector
  kind: str = "non-unimodal"


@dataclass
class CampaignSummary:
  mode: Mode
  seed: int
  instances: int = 0
  regions: int = 0
  max_regions: int = 0
  findings: list[Finding] = field(default_factory=list)

  def as_dict(self) -> dict:
    return {
      "mode": self.mode.value,
      "seed": self.seed,
      "instances": self.instances,
      "regions": self.regions,
      "max_regions": self.max_regions,
      "findings": [
        {
          "iteration": f.iteration,
          "seed": f.seed,
          "kind": f.kind,
          "polytope": dump_polytope(f.polytope),
          "weights": plain(f.weights),
          "gamma_hat": plain(f.gamma_hat),
        }
        for f in self.findings
      ],
    }


def iteration_seed(seed: int, iteration: int) -> int:
  return seed * 100_003 + iteration


def _randint(rng: np.random.Generator, low: int, high: int) -> int:
  return int(rng.integers(low, high, endpoint=True))


def _random_region_weights(rng: np.random.Generator, regions: Sequence[Region], even: bool) -> RegionWeights:
  raw = {r.key: _randint(rng, 0, 5) for r in regions}
  if even:
    flip = str.maketrans("+-", "-+")
    raw = {key: raw[key] + raw[key.translate(flip)] for key in raw}
  if not any(raw.values()):
    raw[regions[0].key] = 1
    if even:
      raw[negate_region(regions[0]).key] = 1
  total = sum(raw.values())
  return RegionWeights.of({key: Fraction(v, total) for key, v in raw.items() if v})


def _random_point_masses(rng: np.random.Generator, p: VPolytope, even: bool) -> PointMasses:
  arr = build_arrangement(p)
  rays = []
  wanted = _randint(rng, 1, 4)
  while len(rays) < wanted:
    ray = tuple(_randint(rng, -50, 50) for _ in range(p.dim))
    try:
      region_of_ray(arr, ray)
    except BoundaryRayError:
      continue
    rays.append(ray)
  raw = [_randint(rng, 1, 5) for _ in rays]
  total = sum(raw) * (2 if even else 1)
  atoms = [Atom(tuple(Fraction(a) for a in ray), Fraction(w, total)) for ray, w in zip(rays, raw)]
  if even:
    atoms += [Atom(neg(a.ray), a.weight) for a in atoms]
  return PointMasses(tuple(atoms))


def _campaign_instance(cfg: SearchConfig, iteration: int) -> tuple[VPolytope, AngleModel, int]:
  seed = iteration_seed(cfg.seed, iteration)
  rng = np.random.default_rng(seed)
  d = _randint(rng, 2, cfg.dim)
  n = _randint(rng, d + 1, max(d + 1, min(cfg.vertices, d + 4)))
  p = random_simplicial_polytope(d, n, seed)
  even = iteration % 2 == 1
  arr = build_arrangement(p)
  if arr.size <= setting("ENUMERATION_LIMIT"):
    return p, _random_region_weights(rng, enumerate_regions(arr), even), seed
  return p, _random_point_masses(rng, p, even), seed


def random_verify_campaign(cfg: SearchConfig) -> CampaignSummary:
  """Re-verify every theorem check on random instances; the first failure aborts."""
  summary = CampaignSummary(cfg.mode, cfg.seed)
  for iteration in range(cfg.max_iter):
    p, model, seed = _campaign_instance(cfg, iteration)
    try:
      weights = evaluate(model, build_arrangement(p))
      report = analyze_weights(p, weights, name=p.name, all_regions=True)
    except AnglevecError as exc:
      raise CheckFailure(
        f"Iteration {iteration} raised {exc.code}: {exc}",
        iteration=iteration,
        seed=seed,
        polytope=dump_polytope(p),
      ) from exc
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
      raise CheckFailure(
        f"Iteration {iteration} failed {', '.join(failed)}",
        iteration=iteration,
        seed=seed,
        polytope=dump_polytope(p),
        weights={r.key: w for r, w in weights},
        checks=failed,
      )
    _tally(summary, report)
    if not report.properties.get("unimodal", True):
      summary.findings.append(Finding(iteration, seed, p, {r.key: w for r, w in weights}, report.gamma_hat))
      logger.info("Non-unimodal gamma-hat %s at iteration %d (seed %d)", report.gamma_hat, iteration, seed)
    logger.debug("Campaign iteration %d: d=%d, n=%d, status %s", iteration, p.dim, p.vertex_count, report.status.value)
  logger.info("Campaign done: %d instances, %d regions, largest arrangement %d regions", summary.instances, summary.regions, summary.max_regions)
  return summary


def _tally(summary: CampaignSummary, report: AnalysisReport):
  summary.instances += 1
  summary.regions += report.arrangement["examined"]
  summary.max_regions = max(summary.max_regions, report.arrangement["examined"])


def non_unimodal_search(cfg: SearchConfig) -> CampaignSummary:
  """Collect random instances whose gamma-hat is not unimodal, without running the full checks."""
  summary = CampaignSummary(cfg.mode, cfg.seed)
  for iteration in range(cfg.max_iter):
    p, model, seed = _campaign_instance(cfg, iteration)
    weights = evaluate(model, build_arrangement(p))
    gamma = gamma_hat(p, weights)
    summary.instances += 1
    summary.regions += len(weights)
    summary.max_regions = max(summary.max_regions, len(weights))
    if not is_unimodal(gamma.entries):
      summary.findings.append(Finding(iteration, seed, p, {r.key: w for r, w in weights}, gamma))
      logger.info("Non-unimodal gamma-hat %s at iteration %d (seed %d)", gamma, iteration, seed)
  return summary


def spherical_model(samples: int | None = None, seed: int | None = None) -> SphericalMC:
  return SphericalMC(
    samples if samples is not None else setting("MC_SAMPLES"),
    seed if seed is not None else setting("SEED"),
    setting("MC_WORKERS"),
  )
