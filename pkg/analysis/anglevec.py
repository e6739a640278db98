"""alpha-hat and gamma-hat vectors and the checks run against them."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from analysis.angles import AngleModel, RegionWeightVector, evaluate
from analysis.shadow import (
  ball_dehn_sommerville_check,
  dark_h_vector,
  line_shelling,
  relative_f_vector,
  shadow_decomposition,
  shadow_g_vector,
  shelling_dark_h_vector,
  validate_shelling,
)
from analysis.vectors import (
  AngleVector,
  FVector,
  GammaVector,
  GVector,
  HVector,
  gamma_from_alpha,
  h_from_f,
  is_nondecreasing,
  is_palindromic,
  is_unimodal,
)
from geometry.arrangement import Region, build_arrangement, enumerate_regions, negate_region
from geometry.exceptions import ConsistencyError, NotSimplicial, PreconditionError, WeightError
from geometry.polytope import VPolytope, f_vector, is_simplicial, negate

logger = logging.getLogger(__name__)

# Integer per-region comparisons never get Monte-Carlo slack.
_INTEGRAL = RegionWeightVector(())

CHECK_NAMES = (
  "route",
  "ds",
  "nonneg",
  "first-half",
  "flawless",
  "gamma-top",
  "region-first-half",
  "region-flawless",
  "projection-alpha",
  "projection-gamma",
  "middle",
  "nondecreasing-shape",
  "bipyramid-law",
  "low-dim-unimodal",
  "partition",
  "antipode",
  "reflection",
  "closure",
  "purity",
  "region-h-nonneg",
  "ball-ds",
  "simplex-law",
  "shelling",
)


class Status(str, enum.Enum):
  PASS = "pass"
  FAIL = "fail"
  APPROX = "approx-pass"


@dataclass(frozen=True)
class CheckResult:
  name: str
  status: Status
  witness: dict = field(default_factory=dict, compare=False)

  @property
  def passed(self) -> bool:
    return self.status is not Status.FAIL


@dataclass(frozen=True)
class RegionRecord:
  key: str
  weight: Fraction
  f_dark: FVector
  h_dark: HVector | None
  f_shadow: FVector
  g_shadow: GVector | None


@dataclass
class AnalysisReport:
  polytope_id: str
  dim: int
  vertex_count: int
  simplicial: bool
  arrangement: dict
  estimated: bool
  samples: int | None
  regions: list[RegionRecord]
  f_boundary: FVector
  h_boundary: HVector | None
  alpha_hat: AngleVector
  alpha_hat_reflected: AngleVector
  gamma_hat: GammaVector | None
  gamma_hat_reflected: GammaVector | None
  properties: dict
  checks: list[CheckResult]

  @property
  def status(self) -> Status:
    if any(c.status is Status.FAIL for c in self.checks):
      return Status.FAIL
    if any(c.status is Status.APPROX for c in self.checks):
      return Status.APPROX
    return Status.PASS

  def check(self, name: str) -> CheckResult | None:
    return next((c for c in self.checks if c.name == name), None)


@dataclass(frozen=True)
class StructureRecord:
  unimodal: bool
  nondecreasing: bool
  alpha_symmetric: bool
  shape: str
  classification: str
  bipyramid_law: bool | None = None
  upper_tail: bool | None = None


# Comparison helpers. Monte-Carlo weights allow 4/sqrt(samples) per entry.


def _status(holds: bool, gaps: Iterable[Fraction], weights: RegionWeightVector) -> Status:
  if not weights.estimated:
    return Status.PASS if holds else Status.FAIL
  if holds or all(g * g * weights.samples <= 16 for g in gaps):
    return Status.APPROX
  return Status.FAIL


def _equal(name: str, lhs: Sequence, rhs: Sequence, weights: RegionWeightVector, **witness) -> CheckResult:
  gaps = [Fraction(a) - b for a, b in zip(lhs, rhs)]
  status = _status(all(g == 0 for g in gaps), gaps, weights)
  if status is Status.FAIL:
    witness = {"lhs": tuple(lhs), "rhs": tuple(rhs), **witness}
  return CheckResult(name, status, witness)


def _at_most(name: str, pairs: Sequence[tuple[int, Fraction, Fraction]], weights: RegionWeightVector) -> CheckResult:
  """Each (index, a, b) must satisfy a <= b."""
  broken = [(i, a, b) for i, a, b in pairs if a > b]
  status = _status(not broken, [a - b for _, a, b in broken], weights)
  witness = {"violations": [(i, a, b) for i, a, b in broken]} if broken else {}
  return CheckResult(name, status, witness)


def _exact(name: str, holds: bool, **witness) -> CheckResult:
  return CheckResult(name, Status.PASS if holds else Status.FAIL, {} if holds else witness)


def _require_simplicial(p: VPolytope):
  if not is_simplicial(p):
    raise NotSimplicial(f"{p.name or 'The polytope'} is not simplicial; gamma-hat is undefined")


def _check_weights(p: VPolytope, weights: RegionWeightVector):
  size = build_arrangement(p).size
  for region, _ in weights:
    if len(region.signs) != size:
      raise WeightError(f"Region {region.key} does not belong to an arrangement of {size} hyperplanes")


# Per-region vectors.


def dark_f(p: VPolytope, region: Region) -> FVector:
  return relative_f_vector(shadow_decomposition(p, region).dark)


def dark_h(p: VPolytope, region: Region) -> HVector:
  return dark_h_vector(shadow_decomposition(p, region).dark)


def shadow_f(p: VPolytope, region: Region) -> FVector:
  return relative_f_vector(shadow_decomposition(p, region).shadow)


def shadow_g(p: VPolytope, region: Region) -> GVector:
  return shadow_g_vector(shadow_decomposition(p, region).shadow)


def boundary_h(p: VPolytope) -> HVector:
  return h_from_f(f_vector(p.lattice), p.dim)


def _weighted_sum(weights: RegionWeightVector, vectors, length: int) -> list[Fraction]:
  total = [Fraction(0)] * length
  for region, w in weights:
    for i, value in enumerate(vectors(region)):
      total[i] += w * value
  return total


# Operations.


def alpha_hat(p: VPolytope, weights: RegionWeightVector) -> AngleVector:
  _check_weights(p, weights)
  return AngleVector(tuple(_weighted_sum(weights, lambda r: dark_f(p, r).entries, p.dim + 1)))


def gamma_hat(p: VPolytope, weights: RegionWeightVector) -> GammaVector:
  _require_simplicial(p)
  _check_weights(p, weights)
  by_regions = GammaVector(tuple(_weighted_sum(weights, lambda r: dark_h(p, r).entries, p.dim + 1)))
  by_transform = gamma_from_alpha(alpha_hat(p, weights), p.dim)
  if by_regions != by_transform:
    raise ConsistencyError(f"gamma-hat routes disagree: {by_regions} by regions, {by_transform} by transform")
  return by_regions


def check_route_agreement(p: VPolytope, weights: RegionWeightVector) -> CheckResult:
  by_regions = _weighted_sum(weights, lambda r: dark_h(p, r).entries, p.dim + 1)
  by_transform = gamma_from_alpha(alpha_hat(p, weights), p.dim).entries
  return _exact("route", by_regions == list(by_transform), regions=tuple(by_regions), transform=by_transform)


def check_dehn_sommerville(p: VPolytope, weights: RegionWeightVector) -> CheckResult:
  d = p.dim
  gamma, reflected, h = gamma_hat(p, weights), gamma_hat(negate(p), weights), boundary_h(p)
  lhs = [gamma[i] + reflected[d - i] for i in range(d + 1)]
  return _equal("ds", lhs, h.entries, weights)


def naive_dehn_sommerville(p: VPolytope, weights: RegionWeightVector) -> bool:
  """The identity with P in place of -P; generally false."""
  d = p.dim
  gamma, h = gamma_hat(p, weights), boundary_h(p)
  return all(gamma[i] + gamma[d - i] == h[i] for i in range(d + 1))


def check_inequalities(p: VPolytope, weights: RegionWeightVector) -> list[CheckResult]:
  d = p.dim
  gamma = gamma_hat(p, weights)
  half_up, half_down = (d + 1) // 2, d // 2
  results = [
    _at_most("nonneg", [(i, Fraction(0), gamma[i]) for i in range(d + 1)], weights),
    _at_most("first-half", [(i, gamma[i - 1], gamma[i]) for i in range(1, half_up + 1)], weights),
    _at_most("flawless", [(i, gamma[i], gamma[d - i]) for i in range(half_down + 1)], weights),
    _equal("gamma-top", [gamma[d]], [weights.total()], weights),
  ]
  rising, flawless = [], []
  for region, _ in weights:
    h = dark_h(p, region)
    rising += [(f"{region.key}:{i}", h[i - 1], h[i]) for i in range(1, half_up + 1)]
    flawless += [(f"{region.key}:{i}", h[i], h[d - i]) for i in range(half_down + 1)]
  results.append(_at_most("region-first-half", rising, _INTEGRAL))
  results.append(_at_most("region-flawless", flawless, _INTEGRAL))
  return results


def check_projection_identities(p: VPolytope, weights: RegionWeightVector) -> list[CheckResult]:
  d = p.dim
  f_boundary = f_vector(p.lattice)
  alpha_sum = [a + b for a, b in zip(alpha_hat(p, weights), alpha_hat(negate(p), weights))]
  projected = _weighted_sum(weights, lambda r: (f_boundary - shadow_f(p, r)).entries, d + 1)
  convex = all(w >= 0 for _, w in weights) and weights.total() == 1
  results = [_equal("projection-alpha", alpha_sum, projected, weights, convex_coefficients=convex)]
  if is_simplicial(p):
    gamma_sum = [a + b for a, b in zip(gamma_hat(p, weights), gamma_hat(negate(p), weights))]
    h = boundary_h(p)
    shadow_sum = _weighted_sum(weights, lambda r: shadow_g(p, r).entries, d + 1)
    results.append(_equal("projection-gamma", gamma_sum, [h[i] - shadow_sum[i] for i in range(d + 1)], weights))
  return results


def naive_projection(p: VPolytope, weights: RegionWeightVector) -> bool:
  """2 alpha-hat(P) against the projection sum; holds for alpha-symmetric inputs only."""
  f_boundary = f_vector(p.lattice)
  projected = _weighted_sum(weights, lambda r: (f_boundary - shadow_f(p, r)).entries, p.dim + 1)
  return [2 * a for a in alpha_hat(p, weights)] == projected


def check_alpha_symmetric(p: VPolytope, weights: RegionWeightVector) -> bool:
  ours, theirs = alpha_hat(p, weights), alpha_hat(negate(p), weights)
  return _status(ours == theirs, [a - b for a, b in zip(ours, theirs)], weights) is not Status.FAIL


def check_middle_entry(p: VPolytope, weights: RegionWeightVector) -> CheckResult:
  d = p.dim
  if d % 2:
    raise PreconditionError(f"The middle entry needs an even dimension, got d={d}")
  _require_simplicial(p)
  if not check_alpha_symmetric(p, weights):
    raise PreconditionError("The middle entry identity needs an alpha-symmetric input")
  m = d // 2
  return _equal("middle", [2 * gamma_hat(p, weights)[m]], [boundary_h(p)[m]], weights)


def is_bipyramid(p: VPolytope) -> bool:
  if p.vertex_count != p.dim + 2 or not is_simplicial(p):
    return False
  if p.dim == 2:
    # Every quadrilateral is a bipyramid over a segment.
    return True
  shares = {
    (i, j): any(i in f.vertex_set and j in f.vertex_set for f in p.facets)
    for i, j in combinations(range(p.vertex_count), 2)
  }
  for apexes in (pair for pair, together in shares.items() if not together):
    base = [v for v in range(p.vertex_count) if v not in apexes]
    if all(shares[pair] for pair in combinations(base, 2)):
      return True
  return False


def unimodality_and_structure(p: VPolytope, weights: RegionWeightVector) -> StructureRecord:
  _require_simplicial(p)
  d = p.dim
  gamma = gamma_hat(p, weights)
  symmetric = check_alpha_symmetric(p, weights)
  simplex = p.vertex_count == d + 1
  shape = "simplex" if simplex else "bipyramid" if is_bipyramid(p) else "other"
  nondecreasing = is_nondecreasing(gamma.entries)

  classification = "n/a"
  bipyramid_law = None
  if nondecreasing:
    if shape == "other":
      classification = "violation" if symmetric else "unconstrained"
    else:
      classification = shape
  if shape == "bipyramid" and symmetric and nondecreasing:
    simplex_boundary = (1,) + tuple(comb(d, i + 1) for i in range(d - 1)) + (0,)
    bipyramid_law = gamma.entries == (0,) + (1,) * d and all(
      shadow_f(p, region).entries == simplex_boundary for region, _ in weights
    )
  upper_tail = gamma[d - 1] >= gamma[d] == 1 if symmetric and not simplex else None
  return StructureRecord(is_unimodal(gamma.entries), nondecreasing, symmetric, shape, classification, bipyramid_law, upper_tail)


def check_region_invariants(
  p: VPolytope, region: Region, shelling: bool = True, reflected: VPolytope | None = None
) -> list[CheckResult]:
  """Everything that must hold for one region, independent of the weights."""
  reflected = reflected or negate(p)
  d = p.dim
  lattice = p.lattice
  parts = shadow_decomposition(p, region)
  dark, shadow, bright = parts.dark.kept, parts.shadow.kept, parts.bright.kept
  key = region.key

  boundary = set(lattice.boundary_faces)
  disjoint = not (dark & shadow or dark & bright or shadow & bright)
  counts_ok = (relative_f_vector(parts.dark) + relative_f_vector(parts.bright)) == (
    f_vector(lattice) - relative_f_vector(parts.shadow)
  )
  results = [_exact("partition", disjoint and (dark | shadow | bright) == boundary and counts_ok, region=key)]

  results.append(
    _exact("antipode", bright == shadow_decomposition(p, negate_region(region)).dark.kept, region=key)
  )
  results.append(_exact("reflection", shadow_decomposition(reflected, region).dark.kept == bright, region=key))

  def generated(facets) -> frozenset:
    seen, pending = set(), [f.vertex_set for f in facets]
    while pending:
      face = pending.pop()
      if face and face not in seen:
        seen.add(face)
        pending.extend(lattice.subfaces(face))
    return frozenset(seen)

  dark_mask = build_arrangement(p).dark_mask(region)
  dark_bar = generated(f for k, f in enumerate(lattice.facets) if dark_mask >> k & 1)
  bright_bar = generated(f for k, f in enumerate(lattice.facets) if not dark_mask >> k & 1)
  matches = dark_bar == parts.dark_closure.kept and bright_bar == parts.bright_closure.kept
  results.append(_exact("closure", matches and dark_bar & bright_bar == shadow, region=key))

  top = {f for f in boundary if lattice.dimension_of(f) == d - 1}
  ridges = {f for f in boundary if lattice.dimension_of(f) == d - 2}
  pure = parts.dark.facets <= top and parts.bright.facets <= top and (d < 2 or parts.shadow.facets <= ridges)
  results.append(_exact("purity", pure, region=key))

  if not is_simplicial(p):
    return results

  h = dark_h_vector(parts.dark)
  results.append(_exact("region-h-nonneg", all(x >= 0 for x in h), region=key, h_dark=h.entries))
  results.append(_exact("ball-ds", ball_dehn_sommerville_check(p, region), region=key))
  if p.vertex_count == d + 1:
    k = sum(1 for s in build_arrangement(p).facet_signs(region) if s > 0)
    results.append(_exact("simplex-law", h.entries == (0,) * k + (1,) * (d + 1 - k), region=key, h_dark=h.entries))
  if shelling:
    order = line_shelling(p, region)
    counted = validate_shelling(p, order.facet_order) == boundary_h(p) and shelling_dark_h_vector(p, order) == h
    results.append(_exact("shelling", counted, region=key, order=order.facet_order))
  return results


def _fold(results: Iterable[CheckResult]) -> list[CheckResult]:
  """One result per check name; the first failure wins."""
  folded: dict[str, CheckResult] = {}
  for result in results:
    if result.name not in folded or (folded[result.name].passed and not result.passed):
      folded[result.name] = result
  return list(folded.values())


def analyze(p: VPolytope, model: AngleModel, name: str = "", regions: Sequence[Region] | None = None) -> AnalysisReport:
  arr = build_arrangement(p)
  weights = evaluate(model, arr, regions)
  return analyze_weights(p, weights, name=name)


def analyze_weights(
  p: VPolytope, weights: RegionWeightVector, name: str = "", all_regions: bool = False, shelling: bool = True
) -> AnalysisReport:
  d = p.dim
  arr = build_arrangement(p)
  simplicial = is_simplicial(p)
  f_boundary = f_vector(p.lattice)
  h_boundary = boundary_h(p) if simplicial else None

  records = [
    RegionRecord(
      region.key,
      w,
      dark_f(p, region),
      dark_h(p, region) if simplicial else None,
      shadow_f(p, region),
      shadow_g(p, region) if simplicial else None,
    )
    for region, w in weights
  ]

  checks: list[CheckResult] = []
  properties: dict = {"alpha_symmetric": check_alpha_symmetric(p, weights)}
  gamma = reflected = None
  if simplicial:
    gamma, reflected = gamma_hat(p, weights), gamma_hat(negate(p), weights)
    checks.append(check_route_agreement(p, weights))
    checks.append(check_dehn_sommerville(p, weights))
    checks += check_inequalities(p, weights)
    structure = unimodality_and_structure(p, weights)
    properties.update(
      unimodal=structure.unimodal,
      nondecreasing=structure.nondecreasing,
      shape=structure.shape,
      classification=structure.classification,
      naive_dehn_sommerville=naive_dehn_sommerville(p, weights),
      h_palindromic=is_palindromic(h_boundary.entries),
      h_unimodal=is_unimodal(h_boundary.entries),
      h_nonnegative=all(x >= 0 for x in h_boundary),
    )
    if structure.upper_tail is not None:
      properties["upper_tail"] = structure.upper_tail
    if structure.classification != "n/a":
      checks.append(_exact("nondecreasing-shape", structure.classification != "violation", shape=structure.shape))
    if structure.bipyramid_law is not None:
      checks.append(_exact("bipyramid-law", structure.bipyramid_law, gamma_hat=gamma.entries))
    if d <= 3 or (d <= 5 and properties["alpha_symmetric"]):
      checks.append(_exact("low-dim-unimodal", structure.unimodal, gamma_hat=gamma.entries))
    if d % 2 == 0 and properties["alpha_symmetric"]:
      checks.append(check_middle_entry(p, weights))
  checks += check_projection_identities(p, weights)
  properties["naive_projection"] = naive_projection(p, weights)

  if all_regions:
    examined = enumerate_regions(arr)
  else:
    examined = {r for r, _ in weights} | {negate_region(r) for r, _ in weights}
    examined = sorted(examined, key=lambda r: r.key)
  minus_p = negate(p)
  per_region = [c for region in examined for c in check_region_invariants(p, region, shelling, minus_p)]
  checks += _fold(per_region)

  report = AnalysisReport(
    polytope_id=name or p.name,
    dim=d,
    vertex_count=p.vertex_count,
    simplicial=simplicial,
    arrangement={"hyperplanes": arr.size, "support": len(weights), "examined": len(examined)},
    estimated=weights.estimated,
    samples=weights.samples,
    regions=records,
    f_boundary=f_boundary,
    h_boundary=h_boundary,
    alpha_hat=alpha_hat(p, weights),
    alpha_hat_reflected=alpha_hat(negate(p), weights),
    gamma_hat=gamma,
    gamma_hat_reflected=reflected,
    properties=properties,
    checks=checks,
  )
  logger.info("Analyzed %s: %d support regions, status %s", report.polytope_id or "polytope", len(weights), report.status.value)
  return report
