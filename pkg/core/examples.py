"""Worked instances with known vectors, used as the acceptance harness."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from analysis.angles import AngleModel, PointMasses, RegionWeights
from analysis.anglevec import AnalysisReport, analyze, dark_f, dark_h, shadow_f, shadow_g
from analysis.shadow import relative_f_vector, shadow_decomposition
from geometry.arrangement import build_arrangement, enumerate_regions, region_of_ray
from geometry.exceptions import InputError
from geometry.polytope import VPolytope

from .search import projective_one_dark_facet_search, spherical_model

logger = logging.getLogger(__name__)

# Provenance tags for expected values.
WORKED = "worked example"
DERIVED = "derived"
MEASURED = "measured"


@dataclass(frozen=True)
class ExampleInstance:
  polytope: VPolytope
  angle: AngleModel
  # A ray whose region's vectors are compared against `region_expected`.
  region_ray: tuple | None = None


@dataclass(frozen=True)
class ExampleSpec:
  name: str
  description: str
  build: Callable[..., ExampleInstance] = field(repr=False)
  expected: dict[str, tuple] = field(default_factory=dict)
  region_expected: dict[str, tuple] = field(default_factory=dict)
  properties: dict[str, object] = field(default_factory=dict)
  provenance: dict[str, str] = field(default_factory=dict)
  approximate: bool = False


@dataclass
class ExampleOutcome:
  spec: ExampleSpec
  instance: ExampleInstance
  report: AnalysisReport
  actual: dict[str, tuple]
  mismatches: list[str]

  @property
  def matched(self) -> bool:
    return not self.mismatches


def _f(*values) -> tuple[Fraction, ...]:
  return tuple(Fraction(v) for v in values)


# Builders.


def triangle() -> ExampleInstance:
  vertices = [(0, 3), (-3, -2), (3, -2)]
  p = VPolytope.from_points(vertices, name="triangle")
  atoms = [((-x, -y), Fraction(1, 4)) for x, y in vertices] + [((x, y), Fraction(1, 12)) for x, y in vertices]
  return ExampleInstance(p, PointMasses.of(atoms))


def pentagon() -> ExampleInstance:
  p = VPolytope.from_points([(2, 0), (2, 2), (0, 3), (-1, 2), (-1, 0)], name="pentagon")
  regions = enumerate_regions(build_arrangement(p))
  uniform = RegionWeights.of({r.key: Fraction(1, len(regions)) for r in regions})
  return ExampleInstance(p, uniform, region_ray=(4, -1))


NONUNIMODAL6_VERTICES = (
  (-48, -8, 16, -10, 6, -12),
  (-23, -2, -4, 6, 2, 8),
  (-20, -8, 2, -8, 9, 5),
  (-12, -6, -8, 4, 2, 2),
  (3, 0, 2, -2, 3, 1),
  (22, -12, 2, -9, 6, -3),
  (36, 0, -8, 1, -1, -7),
  (50, -9, 4, -10, 6, -4),
  (56, 6, 4, -2, 0, -2),
)


def nonunimodal6() -> ExampleInstance:
  p = VPolytope.from_points(NONUNIMODAL6_VERTICES, name="nonunimodal6")
  e1 = (1, 0, 0, 0, 0, 0)
  model = PointMasses.of([(e1, Fraction(1, 2)), (tuple(-a for a in e1), Fraction(1, 2))])
  return ExampleInstance(p, model, region_ray=e1)


def cross_polytope(d: int) -> VPolytope:
  vertices = [tuple(s if j == i else 0 for j in range(d)) for i in range(d) for s in (1, -1)]
  return VPolytope.from_points(vertices, name=f"cross{d}")


def cross4(seed: int = 7, max_iter: int = 200) -> ExampleInstance:
  """Projective image of the 4-dimensional cross-polytope with a one-dark-facet region."""
  found = projective_one_dark_facet_search(cross_polytope(4), seed, max_iter)
  ray = found.region.witness
  model = PointMasses.of([(ray, Fraction(5, 6)), (tuple(-a for a in ray), Fraction(1, 6))])
  return ExampleInstance(found.polytope, model, region_ray=ray)


def equilateral(samples: int | None = None, seed: int | None = None) -> ExampleInstance:
  p = VPolytope.from_points([(0, 1000), (-866, -500), (866, -500)], name="equilateral")
  return ExampleInstance(p, spherical_model(samples, seed))


def bipyramid(d: int) -> ExampleInstance:
  """Simplex base in the first d-1 coordinates, apexes at +-e_d, masses on the apex axis."""
  base = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d - 1)]
  base.append(tuple(-1 if j < d - 1 else 0 for j in range(d)))
  apex = tuple(1 if j == d - 1 else 0 for j in range(d))
  p = VPolytope.from_points(base + [apex, tuple(-a for a in apex)], name=f"bipyramid{d}")
  model = PointMasses.of([(apex, Fraction(1, 2)), (tuple(-a for a in apex), Fraction(1, 2))])
  return ExampleInstance(p, model, region_ray=apex)


def simplex4() -> ExampleInstance:
  vertices = [tuple(1 if j == i else 0 for j in range(4)) for i in range(4)] + [(-1, -1, -1, -1)]
  p = VPolytope.from_points(vertices, name="simplex4")
  regions = enumerate_regions(build_arrangement(p))
  return ExampleInstance(p, RegionWeights.of({r.key: Fraction(1, len(regions)) for r in regions}))


def _bipyramid_spec(d: int) -> ExampleSpec:
  return ExampleSpec(
    name=f"bipyramid{d}",
    description=f"{d}-dimensional bipyramid over a simplex with half of the mass at each apex direction",
    build=lambda: bipyramid(d),
    expected={"gamma_hat": _f(0, *([1] * d))},
    region_expected={"f_shadow": _f(1, *(math.comb(d, i + 1) for i in range(d - 1)), 0)},
    properties={"alpha_symmetric": True, "nondecreasing": True, "classification": "bipyramid"},
    provenance={"gamma_hat": WORKED, "f_shadow": DERIVED},
  )


def example_registry() -> tuple[ExampleSpec, ...]:
  return (
    ExampleSpec(
      name="triangle",
      description="Origin-interior triangle, mass 1/4 on each -x and 1/12 on each vertex direction x",
      build=triangle,
      expected={
        "alpha_hat": _f(0, Fraction(3, 4), Fraction(7, 4)),
        "gamma_hat": _f(0, Fraction(3, 4), 1),
        "gamma_hat_reflected": _f(0, Fraction(1, 4), 1),
        "h_boundary": _f(1, 1, 1),
      },
      properties={"naive_dehn_sommerville": False, "naive_projection": False},
      provenance={"alpha_hat": WORKED, "gamma_hat": WORKED, "gamma_hat_reflected": WORKED, "h_boundary": WORKED},
    ),
    ExampleSpec(
      name="pentagon",
      description="Pentagon with four arrangement lines, uniform weights on the eight regions",
      build=pentagon,
      expected={"region_count": (8,)},
      region_expected={"f_dark": _f(0, 1, 2), "f_shadow": _f(1, 2, 0), "f_bright": _f(0, 2, 3)},
      properties={"alpha_symmetric": True},
      provenance={"region_count": WORKED, "f_dark": WORKED, "f_shadow": WORKED, "f_bright": WORKED},
    ),
    ExampleSpec(
      name="nonunimodal6",
      description="Simplicial 6-polytope on nine vertices, half of the mass on each of +-e1",
      build=nonunimodal6,
      expected={
        "h_boundary": _f(1, 3, 4, 5, 4, 3, 1),
        "double_gamma_hat": _f(0, 0, 4, 5, 4, 6, 2),
        "gamma_hat": _f(0, 0, 2, Fraction(5, 2), 2, 3, 1),
      },
      region_expected={"g_shadow": _f(1, 3, 0, 0, 0, -3, -1)},
      properties={"unimodal": False, "alpha_symmetric": True},
      provenance={"h_boundary": WORKED, "double_gamma_hat": WORKED, "gamma_hat": DERIVED, "g_shadow": WORKED},
    ),
    ExampleSpec(
      name="cross4",
      description="Projective image of the 4-dimensional cross-polytope, 5/6 on a one-dark-facet region",
      build=cross4,
      expected={"gamma_hat": _f(0, Fraction(2, 3), 1, Fraction(2, 3), 1)},
      region_expected={"h_dark": _f(0, 0, 0, 0, 1)},
      properties={"unimodal": False},
      provenance={"gamma_hat": WORKED, "h_dark": DERIVED},
    ),
    ExampleSpec(
      name="equilateral",
      description="Equilateral triangle under the rotation-invariant spherical measure (Monte Carlo)",
      build=equilateral,
      expected={
        "alpha_hat": _f(0, Fraction(1, 2), Fraction(3, 2)),
        "gamma_hat": _f(0, Fraction(1, 2), 1),
        "region_weights": _f(*([Fraction(1, 6)] * 6)),
      },
      properties={"unimodal": True},
      provenance={"alpha_hat": MEASURED, "gamma_hat": WORKED, "region_weights": DERIVED},
      approximate=True,
    ),
    _bipyramid_spec(3),
    _bipyramid_spec(4),
    _bipyramid_spec(5),
    ExampleSpec(
      name="simplex4",
      description="4-simplex with equal weight on all thirty regions",
      build=simplex4,
      expected={"gamma_hat": _f(0, Fraction(1, 6), Fraction(1, 2), Fraction(5, 6), 1), "region_count": (30,)},
      properties={"nondecreasing": True, "classification": "simplex"},
      provenance={"gamma_hat": DERIVED, "region_count": DERIVED},
    ),
  )


def get_example(name: str) -> ExampleSpec:
  for spec in example_registry():
    if spec.name == name:
      return spec
  known = ", ".join(s.name for s in example_registry())
  raise InputError(f"Unknown example {name!r}; known: {known}")


# Running.


def _actual_vectors(spec: ExampleSpec, instance: ExampleInstance, report: AnalysisReport) -> dict[str, tuple]:
  p = instance.polytope
  actual: dict[str, tuple] = {
    "alpha_hat": report.alpha_hat.entries,
    "alpha_hat_reflected": report.alpha_hat_reflected.entries,
    "region_weights": tuple(r.weight for r in report.regions),
  }
  if report.h_boundary is not None:
    actual["h_boundary"] = report.h_boundary.entries
  if report.gamma_hat is not None:
    actual["gamma_hat"] = report.gamma_hat.entries
    actual["gamma_hat_reflected"] = report.gamma_hat_reflected.entries
    actual["double_gamma_hat"] = tuple(2 * x for x in report.gamma_hat)
  arr = build_arrangement(p)
  if "region_count" in spec.expected:
    actual["region_count"] = (len(enumerate_regions(arr)),)
  if instance.region_ray is not None:
    region = region_of_ray(arr, instance.region_ray)
    actual["f_dark"] = dark_f(p, region).entries
    actual["f_shadow"] = shadow_f(p, region).entries
    actual["f_bright"] = relative_f_vector(shadow_decomposition(p, region).bright).entries
    if report.simplicial:
      actual["h_dark"] = dark_h(p, region).entries
      actual["g_shadow"] = shadow_g(p, region).entries
  return actual


def _tolerance(spec: ExampleSpec, report: AnalysisReport) -> Fraction:
  if not spec.approximate or not report.samples:
    return Fraction(0)
  return max(Fraction(1, 100), Fraction(4) / Fraction(math.isqrt(report.samples)))


def _show(values) -> str:
  return "(" + ", ".join(str(x) for x in values) + ")"


def _compare(name: str, want: tuple, got: tuple | None, tol: Fraction) -> str | None:
  if got is None:
    return f"{name}: not computed"
  if len(want) != len(got) or any(abs(Fraction(a) - Fraction(b)) > tol for a, b in zip(want, got)):
    return f"{name}: expected {_show(want)}, got {_show(got)}"
  return None


def run_example(spec: ExampleSpec, **build_options) -> ExampleOutcome:
  instance = spec.build(**build_options)
  report = analyze(instance.polytope, instance.angle, name=spec.name)
  actual = _actual_vectors(spec, instance, report)
  tol = _tolerance(spec, report)

  mismatches = []
  for name, want in list(spec.expected.items()) + list(spec.region_expected.items()):
    problem = _compare(name, want, actual.get(name), tol)
    if problem:
      mismatches.append(problem)
  for name, want in spec.properties.items():
    if report.properties.get(name) != want:
      mismatches.append(f"{name}: expected {want}, got {report.properties.get(name)}")
  failed = [c.name for c in report.checks if not c.passed]
  if failed:
    mismatches.append(f"checks failed: {', '.join(failed)}")

  logger.info("Example %s: %s", spec.name, "matched" if not mismatches else f"{len(mismatches)} mismatches")
  return ExampleOutcome(spec, instance, report, actual, mismatches)
