from fractions import Fraction

from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hsettings, strategies as st

from .arrangement import CentralArrangement, build_arrangement, enumerate_regions, negate_region, region_of_ray
from .conf import setting
from .exact import (
  ProjectiveMap,
  SquareMap,
  apply_map,
  determinant,
  dot,
  format_rational,
  integer_vector,
  nullspace,
  primitive_normal,
  rank,
  rref,
  to_rational,
)
from .exceptions import (
  BoundaryRayError,
  DimensionMismatch,
  DuplicateVertex,
  InputError,
  NotFullDimensional,
  RedundantPoint,
  SingularMapError,
  ZeroVectorError,
)
from .polytope import VPolytope, f_vector, is_simplicial, negate

SQUARE = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
CUBE = [(x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1)]
OCTAHEDRON = [tuple(s if j == i else 0 for j in range(3)) for i in range(3) for s in (1, -1)]
PENTAGON = [(2, 0), (2, 2), (0, 3), (-1, 2), (-1, 0)]
SIMPLEX4 = [tuple(1 if j == i else 0 for j in range(4)) for i in range(4)] + [(-1, -1, -1, -1)]

nonzero_pairs = st.tuples(st.integers(-30, 30), st.integers(-30, 30)).filter(lambda v: v != (0, 0))


class ExactArithmeticTests(SimpleTestCase):
  def test_rational_strings(self):
    self.assertEqual(to_rational("-48"), -48)
    self.assertEqual(to_rational("5/6"), Fraction(5, 6))
    self.assertEqual(to_rational(" 3 "), 3)
    self.assertEqual(format_rational(Fraction(4, 2)), "2")
    self.assertEqual(format_rational(Fraction(-5, 6)), "-5/6")

  def test_rejects_malformed_rationals(self):
    for bad in ("1.5", "1/0", "abc", True, None, 1.5):
      with self.assertRaises(InputError):
        to_rational(bad)

  @given(st.fractions())
  def test_rational_text_is_exact(self, value):
    self.assertEqual(to_rational(format_rational(value)), value)

  def test_primitive_normal(self):
    self.assertEqual(primitive_normal((-2, 4)), (1, -2))
    self.assertEqual(primitive_normal((0, -3, 6)), (0, 1, -2))
    self.assertEqual(integer_vector((Fraction(1, 2), Fraction(1, 3))), (3, 2))
    self.assertEqual(integer_vector((-2, -4)), (-1, -2))
    with self.assertRaises(ZeroVectorError):
      primitive_normal((0, 0))

  @given(nonzero_pairs, st.integers(-20, 20).filter(lambda k: k != 0))
  def test_primitive_normal_ignores_scale(self, v, k):
    self.assertEqual(primitive_normal(v), primitive_normal(tuple(k * a for a in v)))

  def test_dot_needs_matching_lengths(self):
    with self.assertRaises(DimensionMismatch):
      dot((1, 2), (1, 2, 3))

  def test_rank_and_nullspace(self):
    self.assertEqual(rank([(1, 2), (2, 4)]), 1)
    self.assertEqual(rank([(1, 0, 0), (0, 1, 0), (1, 1, 1)]), 3)
    kernel = nullspace([(1, 1, 1)], 3)
    self.assertEqual(len(kernel), 2)
    for v in kernel:
      self.assertEqual(dot(v, (1, 1, 1)), 0)

  def test_determinant(self):
    self.assertEqual(determinant([(2, 0), (0, 3)]), 6)
    self.assertEqual(determinant([(0, 1), (1, 0)]), -1)
    self.assertEqual(determinant([(1, 2), (2, 4)]), 0)
    self.assertEqual(determinant([(Fraction(1, 2), 0), (Fraction(-3, 7), Fraction(2, 3))]), Fraction(1, 3))
    self.assertIsInstance(determinant([(3,)]), Fraction)

  def test_rref_over_rationals(self):
    matrix, pivots = rref([(2, 4, 2), (1, 3, 0)])
    self.assertEqual(pivots, [0, 1])
    self.assertEqual(matrix, [[1, 0, 3], [0, 1, -1]])
    self.assertTrue(all(isinstance(a, Fraction) for row in matrix for a in row))
    self.assertEqual(rref([(0, 0), (0, 5)])[1], [1])
    self.assertEqual(nullspace([(1, Fraction(1, 2))], 2), [(Fraction(-1, 2), 1)])

  def test_linear_maps(self):
    squeeze = SquareMap.diagonal([Fraction(1, 10), 1])
    self.assertEqual(squeeze.apply((5, 7)), (Fraction(1, 2), 7))
    with self.assertRaises(SingularMapError):
      SquareMap.diagonal([0, 1])
    with self.assertRaises(DimensionMismatch):
      apply_map(squeeze, VPolytope.from_points(OCTAHEDRON))

  def test_projective_maps(self):
    shift = ProjectiveMap.translation((1, 2))
    self.assertEqual(shift.apply((0, 0)), (1, 2))
    self.assertEqual(shift.compose(ProjectiveMap.translation((-1, 1))).apply((0, 0)), (0, 3))

    push = ProjectiveMap.hyperplane_to_infinity((Fraction(1, 2), 0))
    self.assertEqual(push.apply((1, 0)), (2, 0))
    self.assertEqual(push.denominator((1, 0)), Fraction(1, 2))
    with self.assertRaises(SingularMapError):
      push.apply((2, 0))


class PolytopeTests(SimpleTestCase):
  def test_square_facets(self):
    square = VPolytope.from_points(SQUARE)
    self.assertEqual(len(square.facets), 4)
    for facet in square.facets:
      self.assertEqual(len(facet.vertex_set), 2)
      for i, v in enumerate(square.vertices):
        value = facet.functional.value(v)
        self.assertEqual(value == 0, i in facet.vertex_set)
        self.assertLessEqual(value, 0)

  def test_cube_is_not_simplicial(self):
    cube = VPolytope.from_points(CUBE)
    self.assertFalse(is_simplicial(cube))
    self.assertEqual(f_vector(cube.lattice).entries, (1, 8, 12, 6))
    self.assertTrue(cube.lattice.euler_relation_holds())
    self.assertTrue(cube.lattice.ridges_in_two_facets())

  def test_octahedron_lattice(self):
    octahedron = VPolytope.from_points(OCTAHEDRON)
    self.assertTrue(is_simplicial(octahedron))
    lattice = octahedron.lattice
    self.assertEqual(f_vector(lattice).entries, (1, 6, 12, 8))
    facet = lattice.faces_of_dim(2)[0]
    self.assertEqual(len(lattice.subfaces(facet)), 3)
    self.assertEqual(lattice.dimension_of(frozenset()), -1)
    self.assertEqual(bin(lattice.active_mask(frozenset({0}))).count("1"), 4)

  def test_degenerate_inputs(self):
    with self.assertRaises(NotFullDimensional):
      VPolytope.from_points([(0, 0), (1, 1), (2, 2)]).facets
    with self.assertRaises(RedundantPoint):
      VPolytope.from_points(SQUARE + [(0, 0)]).facets
    with self.assertRaises(DuplicateVertex):
      VPolytope.from_points([(0, 0), (1, 0), (0, 0)])
    with self.assertRaises(DimensionMismatch):
      VPolytope(2, ((Fraction(0), Fraction(0)), (Fraction(1),)))

  def test_negate(self):
    p = VPolytope.from_points(PENTAGON, name="pentagon")
    q = negate(p)
    self.assertEqual(q.name, "-pentagon")
    self.assertEqual(q.vertices[0], (-2, 0))
    self.assertEqual(negate(q).name, "pentagon")
    self.assertEqual([f.vertex_set for f in p.facets], [f.vertex_set for f in q.facets])


class ArrangementTests(SimpleTestCase):
  def test_region_counts(self):
    cases = {
      "triangle": ([(0, 3), (-3, -2), (3, -2)], 3, 6),
      "square": (SQUARE, 2, 4),
      "pentagon": (PENTAGON, 4, 8),
      "octahedron": (OCTAHEDRON, 4, 14),
      "simplex4": (SIMPLEX4, 5, 30),
    }
    for name, (points, hyperplanes, regions) in cases.items():
      with self.subTest(name):
        arr = build_arrangement(VPolytope.from_points(points))
        self.assertEqual(arr.size, hyperplanes)
        self.assertEqual(len(enumerate_regions(arr)), regions)

  def test_witnesses_realize_their_signs(self):
    arr = build_arrangement(VPolytope.from_points(SIMPLEX4))
    for region in enumerate_regions(arr):
      signs = tuple((dot(h, region.witness) > 0) - (dot(h, region.witness) < 0) for h in arr.hyperplanes)
      self.assertEqual(signs, region.signs)

  def test_pentagon_dark_facets(self):
    p = VPolytope.from_points(PENTAGON)
    arr = build_arrangement(p)
    region = region_of_ray(arr, (4, -1))
    dark = [sorted(p.facets[k].vertex_set) for k in range(len(p.facets)) if arr.dark_mask(region) >> k & 1]
    self.assertEqual(dark, [[2, 3], [3, 4]])
    self.assertEqual(negate_region(region).key, region.key.translate(str.maketrans("+-", "-+")))

  def test_boundary_rays_and_bad_keys(self):
    arr = build_arrangement(VPolytope.from_points(SQUARE))
    with self.assertRaises(BoundaryRayError):
      region_of_ray(arr, (0, 1))
    with self.assertRaises(InputError):
      arr.parse_key("+-+")
    with self.assertRaises(InputError):
      arr.parse_key("+x")

  def test_parallel_facets_share_a_hyperplane(self):
    arr = CentralArrangement.from_normals(2, [(1, 0), (-2, 0), (0, 3)])
    self.assertEqual(arr.hyperplanes, ((1, 0), (0, 1)))
    self.assertEqual(arr.source_map, ((0, 1), (0, -1), (1, 1)))

  @hsettings(max_examples=40, deadline=None)
  @given(st.lists(nonzero_pairs, min_size=1, max_size=6))
  def test_planar_arrangements_have_twice_as_many_regions_as_lines(self, normals):
    arr = CentralArrangement.from_normals(2, normals)
    self.assertEqual(len(enumerate_regions(arr)), 2 * arr.size)


class SettingsTests(SimpleTestCase):
  @override_settings(ANGLEVEC={"SEED": 7})
  def test_overrides_fall_back_to_defaults(self):
    self.assertEqual(setting("SEED"), 7)
    self.assertEqual(setting("BOX_SIDE"), 200)

  def test_unknown_setting(self):
    with self.assertRaises(KeyError):
      setting("NOPE")
