import json
import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, settings as hsettings, strategies as st

from geometry.arrangement import build_arrangement, enumerate_regions, region_of_ray
from geometry.exceptions import (
  ApproximateModelError,
  BoundaryRayError,
  DimensionMismatch,
  InputError,
  NotSimplicial,
  PreconditionError,
  ShellingError,
  WeightError,
  ZeroVectorError,
)
from geometry.polytope import VPolytope, negate

from .angles import PointMasses, RegionWeights, SphericalMC, evaluate, is_even_on, mirror, tangent_cone_measure
from .anglevec import (
  Status,
  alpha_hat,
  analyze,
  analyze_weights,
  check_middle_entry,
  check_region_invariants,
  gamma_hat,
  is_bipyramid,
  naive_dehn_sommerville,
  unimodality_and_structure,
)
from .codec import canonical, dump_angle, dump_report, load_angle, load_polytope, plain, read_json
from .shadow import (
  ball_dehn_sommerville_check,
  dark_h_vector,
  is_dark,
  line_shelling,
  relative_f_vector,
  shadow_decomposition,
  shelling_dark_h_vector,
  tangent_active_set,
  validate_shelling,
)
from .vectors import (
  AngleVector,
  FVector,
  GammaVector,
  HVector,
  f_from_h,
  g_from_h,
  gamma_from_alpha,
  h_from_f,
  is_nondecreasing,
  is_palindromic,
  is_unimodal,
)

TRIANGLE = [(0, 3), (-3, -2), (3, -2)]
SQUARE = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
RHOMBUS = [(2, 0), (0, 1), (-2, 0), (0, -1)]
PENTAGON = [(2, 0), (2, 2), (0, 3), (-1, 2), (-1, 0)]
CUBE = [(x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1)]
OCTAHEDRON = [tuple(s if j == i else 0 for j in range(3)) for i in range(3) for s in (1, -1)]
SIMPLEX4 = [tuple(1 if j == i else 0 for j in range(4)) for i in range(4)] + [(-1, -1, -1, -1)]
BIPYRAMID3 = [(1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 1), (0, 0, -1)]


def triangle_model() -> PointMasses:
  atoms = [((-x, -y), Fraction(1, 4)) for x, y in TRIANGLE] + [((x, y), Fraction(1, 12)) for x, y in TRIANGLE]
  return PointMasses.of(atoms)


def weights_of(points, model):
  p = VPolytope.from_points(points)
  return p, evaluate(model, build_arrangement(p))


def uniform(p: VPolytope) -> RegionWeights:
  regions = enumerate_regions(build_arrangement(p))
  return RegionWeights.of({r.key: Fraction(1, len(regions)) for r in regions})


angle_vectors = st.integers(1, 6).flatmap(
  lambda d: st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=12), min_size=d, max_size=d)
)


class VectorTests(SimpleTestCase):
  def test_h_vectors_of_boundaries(self):
    self.assertEqual(h_from_f(FVector((1, 3, 3)), 2).entries, (1, 1, 1))
    self.assertEqual(h_from_f(FVector((1, 6, 12, 8)), 3).entries, (1, 3, 3, 1))
    self.assertEqual(f_from_h(HVector((1, 3, 3, 1)), 3).entries, (1, 6, 12, 8))

  def test_g_vector(self):
    self.assertEqual(g_from_h(HVector((1, 4, 4, 4, 4, 1))).entries, (1, 3, 0, 0, 0, -3, -1))

  @given(st.integers(1, 7).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.integers(-50, 50), min_size=d, max_size=d))))
  def test_f_and_h_determine_each_other(self, case):
    d, tail = case
    f = FVector((1, *tail))
    self.assertEqual(f_from_h(h_from_f(f, d), d), f)

  @given(angle_vectors, st.data())
  def test_gamma_from_alpha_is_linear(self, tail, data):
    d = len(tail)
    other = data.draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=12), min_size=d, max_size=d))
    a, b = AngleVector((0, *tail)), AngleVector((0, *other))
    self.assertEqual(gamma_from_alpha(a + b, d), gamma_from_alpha(a, d) + gamma_from_alpha(b, d))

  def test_index_conventions(self):
    f = FVector((1, 3, 3))
    self.assertEqual(f[-1], 1)
    self.assertEqual(f[5], 0)
    self.assertEqual(str(f), "(1, 3, 3)")
    self.assertEqual(f.labelled(), "[-1]=1  [0]=3  [1]=3")
    with self.assertRaises(InputError):
      FVector((2, 3, 3))
    with self.assertRaises(InputError):
      AngleVector((1, 0))
    with self.assertRaises(DimensionMismatch):
      GammaVector((0, 1)) + HVector((0, 1))
    with self.assertRaises(DimensionMismatch):
      h_from_f(FVector((1, 3, 3)), 3)

  def test_shape_predicates(self):
    self.assertTrue(is_unimodal((0, 1, 1, 0)))
    self.assertTrue(is_unimodal((0, Fraction(3, 4), 1)))
    self.assertFalse(is_unimodal((0, 0, 4, 5, 4, 6, 2)))
    self.assertFalse(is_unimodal((0, Fraction(2, 3), 1, Fraction(2, 3), 1)))
    self.assertTrue(is_nondecreasing((0, 1, 1, 1)))
    self.assertFalse(is_nondecreasing((0, 2, 1)))
    self.assertTrue(is_palindromic((1, 3, 4, 5, 4, 3, 1)))


class ShadowTests(SimpleTestCase):
  def test_pentagon_decomposition(self):
    p = VPolytope.from_points(PENTAGON)
    region = region_of_ray(build_arrangement(p), (4, -1))
    parts = shadow_decomposition(p, region)
    self.assertEqual(relative_f_vector(parts.dark).entries, (0, 1, 2))
    self.assertEqual(relative_f_vector(parts.shadow).entries, (1, 2, 0))
    self.assertEqual(relative_f_vector(parts.bright).entries, (0, 2, 3))
    self.assertTrue(is_dark(frozenset({3}), region, p))
    self.assertFalse(is_dark(frozenset({2}), region, p))
    self.assertEqual(parts.dark.facets, frozenset({frozenset({2, 3}), frozenset({3, 4})}))

  def test_tangent_cones(self):
    p = VPolytope.from_points(OCTAHEDRON)
    self.assertEqual(len(tangent_active_set(frozenset({0}), p.lattice).active_facets), 4)
    self.assertEqual(len(tangent_active_set(frozenset({0, 2}), p.lattice).active_facets), 2)
    with self.assertRaises(PreconditionError):
      tangent_active_set(frozenset(), p.lattice)

  def test_line_shellings_count_h_vectors(self):
    p = VPolytope.from_points(OCTAHEDRON)
    for region in enumerate_regions(build_arrangement(p)):
      with self.subTest(region.key):
        order = line_shelling(p, region)
        self.assertEqual(validate_shelling(p, order.facet_order).entries, (1, 3, 3, 1))
        self.assertEqual(shelling_dark_h_vector(p, order), dark_h_vector(shadow_decomposition(p, region).dark))
        self.assertTrue(ball_dehn_sommerville_check(p, region))

  def test_invalid_shelling_orders(self):
    p = VPolytope.from_points(OCTAHEDRON)
    sets = [f.vertex_set for f in p.facets]
    first, opposite = sets.index(frozenset({0, 2, 4})), sets.index(frozenset({1, 3, 5}))
    rest = [k for k in range(len(sets)) if k not in (first, opposite)]
    with self.assertRaises(ShellingError):
      validate_shelling(p, (first, opposite, *rest))
    with self.assertRaises(ShellingError):
      validate_shelling(p, (0, 0, *range(2, len(sets))))

  def test_shellings_need_simplicial_polytopes(self):
    p = VPolytope.from_points(CUBE)
    region = enumerate_regions(build_arrangement(p))[0]
    with self.assertRaises(NotSimplicial):
      line_shelling(p, region)


class AngleModelTests(SimpleTestCase):
  def test_point_mass_validation(self):
    with self.assertRaises(WeightError):
      PointMasses.of([((1, 2), Fraction(1, 2))])
    with self.assertRaises(WeightError):
      PointMasses.of([((1, 2), Fraction(3, 2)), ((2, 1), Fraction(-1, 2))])
    with self.assertRaises(ZeroVectorError):
      PointMasses.of([((0, 0), 1)])

  def test_region_weight_validation(self):
    p = VPolytope.from_points(TRIANGLE)
    arr = build_arrangement(p)
    realized = {r.key for r in enumerate_regions(arr)}
    missing = next(
      key for key in ("+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---") if key not in realized
    )
    with self.assertRaises(WeightError):
      evaluate(RegionWeights.of({missing: 1}), arr)
    with self.assertRaises(WeightError):
      RegionWeights((("++-", Fraction(1, 2)), ("++-", Fraction(1, 2))))
    with self.assertRaises(InputError):
      evaluate(RegionWeights.of({"+x+": 1}), arr)

  def test_atoms_on_hyperplanes_are_rejected(self):
    arr = build_arrangement(VPolytope.from_points(SQUARE))
    with self.assertRaises(BoundaryRayError):
      evaluate(PointMasses.of([((0, 1), 1)]), arr)

  def test_mirror_and_evenness(self):
    arr = build_arrangement(VPolytope.from_points(SQUARE))
    even = PointMasses.of([((1, 2), Fraction(1, 2)), ((-1, -2), Fraction(1, 2))])
    lopsided = PointMasses.of([((1, 2), 1)])
    self.assertTrue(is_even_on(even, arr))
    self.assertFalse(is_even_on(lopsided, arr))
    self.assertEqual(mirror(lopsided).atoms[0].ray, (-1, -2))
    self.assertEqual(mirror(RegionWeights.of({"+-": 1})).weights, (("-+", Fraction(1)),))
    with self.assertRaises(ApproximateModelError):
      mirror(SphericalMC(10, 1))
    with self.assertRaises(ApproximateModelError):
      is_even_on(SphericalMC(10, 1), arr)

  def test_tangent_cone_measure(self):
    p = VPolytope.from_points(SQUARE)
    model = PointMasses.of([((-1, -1), Fraction(1, 2)), ((1, 1), Fraction(1, 2))])
    self.assertEqual(tangent_cone_measure(model, p, frozenset({0})), Fraction(1, 2))
    self.assertEqual(tangent_cone_measure(model, p, frozenset({0, 1})), Fraction(1, 2))

  def test_spherical_sampling_is_seeded(self):
    arr = build_arrangement(VPolytope.from_points([(0, 1000), (-866, -500), (866, -500)]))
    first = evaluate(SphericalMC(4000, 3), arr)
    again = evaluate(SphericalMC(4000, 3), arr)
    self.assertEqual(first.entries, again.entries)
    self.assertTrue(first.estimated)
    self.assertEqual(first.total(), 1)
    self.assertEqual(len(first), 6)
    for _, weight in first:
      self.assertLess(abs(weight - Fraction(1, 6)), Fraction(7, 100))
    split = evaluate(SphericalMC(4000, 3, workers=2), arr)
    self.assertEqual(split.total(), 1)


class AngleVectorTests(SimpleTestCase):
  def test_triangle(self):
    p, weights = weights_of(TRIANGLE, triangle_model())
    self.assertEqual(alpha_hat(p, weights).entries, (0, Fraction(3, 4), Fraction(7, 4)))
    gamma, reflected = gamma_hat(p, weights), gamma_hat(negate(p), weights)
    self.assertEqual(gamma.entries, (0, Fraction(3, 4), 1))
    self.assertEqual(reflected.entries, (0, Fraction(1, 4), 1))
    self.assertEqual([gamma[i] + reflected[2 - i] for i in range(3)], [1, 1, 1])
    self.assertFalse(naive_dehn_sommerville(p, weights))

  def test_triangle_report(self):
    report = analyze(VPolytope.from_points(TRIANGLE), triangle_model(), name="triangle")
    self.assertEqual(report.status, Status.PASS)
    self.assertEqual(report.check("ds").status, Status.PASS)
    self.assertEqual(report.check("route").status, Status.PASS)
    self.assertFalse(report.properties["naive_projection"])
    self.assertFalse(report.properties["alpha_symmetric"])
    self.assertIsNone(report.check("middle"))

  def test_simplex_law_over_every_region(self):
    p = VPolytope.from_points(SIMPLEX4)
    weights = evaluate(uniform(p), build_arrangement(p))
    report = analyze_weights(p, weights, all_regions=True)
    self.assertEqual(report.arrangement["examined"], 30)
    self.assertEqual(report.gamma_hat.entries, (0, Fraction(1, 6), Fraction(1, 2), Fraction(5, 6), 1))
    self.assertEqual(report.check("simplex-law").status, Status.PASS)
    self.assertEqual(report.properties["classification"], "simplex")
    self.assertEqual(report.status, Status.PASS)

  def test_pentagon_every_region(self):
    p = VPolytope.from_points(PENTAGON)
    report = analyze_weights(p, evaluate(uniform(p), build_arrangement(p)), all_regions=True)
    self.assertEqual(report.status, Status.PASS)
    self.assertTrue(report.properties["alpha_symmetric"])
    self.assertEqual(report.check("middle").status, Status.PASS)
    self.assertEqual(2 * report.gamma_hat[1], 3)

  def test_bipyramid(self):
    p = VPolytope.from_points(BIPYRAMID3)
    self.assertTrue(is_bipyramid(p))
    self.assertFalse(is_bipyramid(VPolytope.from_points(OCTAHEDRON)))
    weights = evaluate(PointMasses.of([((0, 0, 1), Fraction(1, 2)), ((0, 0, -1), Fraction(1, 2))]), build_arrangement(p))
    self.assertEqual(gamma_hat(p, weights).entries, (0, 1, 1, 1))
    structure = unimodality_and_structure(p, weights)
    self.assertEqual(structure.classification, "bipyramid")
    self.assertTrue(structure.bipyramid_law)
    self.assertTrue(structure.upper_tail)

  def test_quadrilateral_is_a_bipyramid(self):
    p = VPolytope.from_points(RHOMBUS)
    self.assertTrue(is_bipyramid(p))
    self.assertFalse(is_bipyramid(VPolytope.from_points(TRIANGLE)))
    model = PointMasses.of([((1, 3), Fraction(1, 2)), ((-1, -3), Fraction(1, 2))])
    weights = evaluate(model, build_arrangement(p))
    self.assertEqual(gamma_hat(p, weights).entries, (0, 1, 1))
    self.assertEqual(unimodality_and_structure(p, weights).classification, "bipyramid")
    report = analyze(p, model, name="rhombus")
    self.assertEqual(report.check("nondecreasing-shape").status, Status.PASS)
    self.assertEqual(report.status, Status.PASS)

  def test_closures_come_from_the_dark_and_bright_facets(self):
    for points in (CUBE, OCTAHEDRON, RHOMBUS):
      p = VPolytope.from_points(points)
      for region in enumerate_regions(build_arrangement(p)):
        with self.subTest(n=p.vertex_count, region=region.key):
          closure = next(c for c in check_region_invariants(p, region, shelling=False) if c.name == "closure")
          self.assertEqual(closure.status, Status.PASS)

  def test_preconditions(self):
    cube = VPolytope.from_points(CUBE)
    cube_weights = evaluate(PointMasses.of([((1, 2, 4), 1)]), build_arrangement(cube))
    with self.assertRaises(NotSimplicial):
      gamma_hat(cube, cube_weights)
    self.assertEqual(alpha_hat(cube, cube_weights)[-1], 0)
    cube_report = analyze(cube, PointMasses.of([((1, 2, 4), 1)]))
    self.assertIsNone(cube_report.gamma_hat)
    self.assertEqual(cube_report.check("projection-alpha").status, Status.PASS)

    octahedron, weights = weights_of(OCTAHEDRON, PointMasses.of([((1, 2, 4), Fraction(1, 2)), ((-1, -2, -4), Fraction(1, 2))]))
    with self.assertRaises(PreconditionError):
      check_middle_entry(octahedron, weights)
    triangle, weights = weights_of(TRIANGLE, triangle_model())
    with self.assertRaises(PreconditionError):
      check_middle_entry(triangle, weights)

  def test_monte_carlo_report(self):
    p = VPolytope.from_points([(0, 1000), (-866, -500), (866, -500)])
    report = analyze(p, SphericalMC(20000, 11))
    self.assertEqual(report.status, Status.APPROX)
    self.assertTrue(report.estimated)
    tolerance = Fraction(4, 141)
    for got, want in zip(report.gamma_hat, (0, Fraction(1, 2), 1)):
      self.assertLessEqual(abs(got - want), tolerance)

  @hsettings(max_examples=15, deadline=None)
  @given(st.lists(st.integers(0, 4), min_size=6, max_size=6).filter(any))
  def test_dehn_sommerville_with_reflection(self, raw):
    p = VPolytope.from_points(TRIANGLE)
    regions = enumerate_regions(build_arrangement(p))
    model = RegionWeights.of({r.key: Fraction(w, sum(raw)) for r, w in zip(regions, raw) if w})
    weights = evaluate(model, build_arrangement(p))
    gamma, reflected = gamma_hat(p, weights), gamma_hat(negate(p), weights)
    self.assertEqual([gamma[i] + reflected[2 - i] for i in range(3)], [1, 1, 1])


class CodecTests(SimpleTestCase):
  def test_load_polytope(self):
    p = load_polytope({"dim": 2, "vertices": [["0", "3"], ["-3", "-2"], ["3", "-2"]], "name": "t"})
    self.assertEqual(p.vertices[0], (0, 3))
    self.assertEqual(p.name, "t")
    with self.assertRaises(InputError):
      load_polytope({"vertices": []})
    with self.assertRaises(DimensionMismatch):
      load_polytope({"dim": 2, "vertices": [["0", "3", "1"]]})
    with self.assertRaises(InputError):
      load_polytope({"dim": 2, "vertices": [["0", "1.5"]]})

  def test_load_angle_models(self):
    masses = load_angle({"type": "point_masses", "atoms": [{"ray": ["1", "0"], "weight": "1"}]})
    self.assertEqual(masses.atoms[0].weight, 1)
    weights = load_angle({"type": "region_weights", "weights": {"+-": "1/2", "-+": "1/2"}})
    self.assertEqual(weights.as_dict()["+-"], Fraction(1, 2))
    sampled = load_angle({"type": "spherical_mc", "samples": 100, "seed": 5})
    self.assertEqual((sampled.samples, sampled.seed, sampled.workers), (100, 5, 1))
    self.assertEqual(load_angle(dump_angle(weights)), weights)
    with self.assertRaises(InputError):
      load_angle({"type": "gaussian"})
    with self.assertRaises(InputError):
      load_angle({"type": "point_masses"})

  def test_report_json_is_canonical(self):
    report = analyze(VPolytope.from_points(TRIANGLE), triangle_model(), name="triangle")
    text = canonical(dump_report(report))
    self.assertEqual(canonical(json.loads(text)), text)
    data = json.loads(text)
    self.assertEqual(data["gamma_hat"], {"first_index": 0, "entries": ["0", "3/4", "1"]})
    self.assertEqual(data["status"], "pass")
    self.assertEqual(plain(Fraction(-5, 6)), "-5/6")

  def test_read_json_errors(self):
    with tempfile.TemporaryDirectory() as tmp:
      broken = Path(tmp) / "broken.json"
      broken.write_text("{not json")
      with self.assertRaises(InputError):
        read_json(broken)
      with self.assertRaises(InputError):
        read_json(Path(tmp) / "missing.json")
