import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.db import IntegrityError, transaction
from django.test import SimpleTestCase, TestCase, override_settings

from analysis.angles import RegionWeights, evaluate
from analysis.anglevec import Status, analyze, analyze_weights
from analysis.codec import dump_angle, dump_polytope
from geometry.arrangement import build_arrangement, enumerate_regions
from geometry.exceptions import InputError, PreconditionError, SearchExhausted
from geometry.polytope import VPolytope, f_vector, is_simplicial

from .cli import run
from .examples import cross_polytope, example_registry, get_example, run_example, triangle
from .models import AnalysisRun, SearchFinding
from .records import record_analysis, record_finding
from .search import (
  Mode,
  SearchConfig,
  combinatorics_preserved,
  flatten,
  flattening_experiment,
  non_unimodal_search,
  projective_one_dark_facet_search,
  random_simplicial_polytope,
  random_verify_campaign,
  spherical_model,
)

SQUARE = [(1, 1), (-1, 1), (-1, -1), (1, -1)]


def write_inputs(tmp, polytope: VPolytope, model) -> tuple[str, str]:
  poly_path, angle_path = Path(tmp) / "p.json", Path(tmp) / "angle.json"
  poly_path.write_text(json.dumps(dump_polytope(polytope)))
  angle_path.write_text(json.dumps(dump_angle(model)))
  return str(poly_path), str(angle_path)


class AnalysisRunModelTests(TestCase):
  def setUp(self):
    instance = triangle()
    self.polytope, self.model = instance.polytope, instance.angle
    self.report = analyze(self.polytope, self.model, name="triangle")

  def test_record_analysis_stores_the_report(self):
    run = record_analysis("triangle", self.polytope, self.model, self.report)
    self.assertEqual(run.status, AnalysisRun.Status.PASS)
    self.assertEqual(run.dimension, 2)
    self.assertEqual(run.vertex_count, 3)
    self.assertEqual(run.report["gamma_hat"]["entries"], ["0", "3/4", "1"])
    self.assertEqual(run.angle["type"], "point_masses")
    self.assertEqual(str(run), "triangle (d=2) - pass")

  def test_status_must_agree_with_checks(self):
    run = record_analysis("triangle", self.polytope, self.model, self.report)
    run.status = AnalysisRun.Status.FAIL
    with self.assertRaises(ValidationError):
      run.full_clean()

  def test_dimension_must_agree_with_report(self):
    run = record_analysis("triangle", self.polytope, self.model, self.report)
    run.dimension = 3
    with self.assertRaises(ValidationError):
      run.full_clean()


class SearchFindingModelTests(TestCase):
  def setUp(self):
    self.polytope = VPolytope.from_points(SQUARE, name="square")

  def test_record_finding_updates_in_place(self):
    record_finding("non-unimodal", 42, 3, self.polytope, {"+-": Fraction(1)}, (0, 1, 1), "non-unimodal")
    finding = record_finding("non-unimodal", 42, 3, self.polytope, {"+-": Fraction(1)}, None, "non-unimodal", notes="again")
    self.assertEqual(SearchFinding.objects.count(), 1)
    self.assertEqual(finding.gamma_hat, [])
    self.assertEqual(finding.notes, "again")
    self.assertEqual(finding.weights, {"+-": "1"})
    self.assertEqual(str(finding), "Non-unimodal gamma-hat (non-unimodal, seed 42, #3)")

  def test_unique_per_iteration(self):
    SearchFinding.objects.create(mode="flatten", kind="failure", seed=1, iteration=0, dimension=2)
    with self.assertRaises(IntegrityError):
      with transaction.atomic():
        SearchFinding.objects.create(mode="flatten", kind="failure", seed=1, iteration=0, dimension=2)
    SearchFinding.objects.create(mode="flatten", kind="failure", seed=1, iteration=1, dimension=2)
    self.assertEqual(SearchFinding.objects.count(), 2)


class RunReportViewTests(TestCase):
  def test_health(self):
    response = self.client.get("/health/")
    self.assertEqual(response.status_code, 200)
    self.assertEqual(response.json(), {"status": "ok"})

  def test_run_report(self):
    instance = triangle()
    report = analyze(instance.polytope, instance.angle, name="triangle")
    run = record_analysis("triangle", instance.polytope, instance.angle, report)
    response = self.client.get(f"/runs/{run.id}/")
    self.assertEqual(response.status_code, 200)
    body = response.json()
    self.assertEqual(body["status"], "pass")
    self.assertEqual(body["report"]["alpha_hat"]["entries"], ["0", "3/4", "7/4"])

  def test_missing_run(self):
    self.assertEqual(self.client.get("/runs/999/").status_code, 404)


class AnglevecCommandTests(TestCase):
  def call(self, *args) -> str:
    out = StringIO()
    call_command("anglevec", *args, stdout=out)
    return out.getvalue()

  def test_triangle_example(self):
    output = self.call("example", "--name", "triangle")
    self.assertIn("gamma_hat = (0, 3/4, 1)", output)
    self.assertIn("matched", output)

  def test_nonunimodal_example_reports_shape(self):
    data = json.loads(self.call("example", "--name", "nonunimodal6", "--format", "json"))
    self.assertTrue(data["matched"])
    self.assertEqual(data["actual"]["double_gamma_hat"], ["0", "0", "4", "5", "4", "6", "2"])
    self.assertFalse(data["report"]["properties"]["unimodal"])

  def test_unknown_example(self):
    with self.assertRaises(CommandError) as ctx:
      self.call("example", "--name", "dodecahedron")
    self.assertEqual(ctx.exception.returncode, 3)

  def test_analyze_and_record(self):
    instance = triangle()
    with tempfile.TemporaryDirectory() as tmp:
      poly, angle = write_inputs(tmp, instance.polytope, instance.angle)
      out_path = Path(tmp) / "report.json"
      self.call("analyze", "--polytope", poly, "--angle", angle, "--format", "json", "--out", str(out_path), "--record")
      data = json.loads(out_path.read_text())
    self.assertEqual(data["gamma_hat_reflected"]["entries"], ["0", "1/4", "1"])
    self.assertEqual(AnalysisRun.objects.get().name, "p")

  def test_regions(self):
    with tempfile.TemporaryDirectory() as tmp:
      poly, _ = write_inputs(tmp, VPolytope.from_points(SQUARE), triangle().angle)
      data = json.loads(self.call("regions", "--polytope", poly, "--format", "json"))
    self.assertEqual(data["hyperplanes"], 2)
    self.assertEqual(len(data["regions"]), 4)

  def test_verify_selected_checks(self):
    instance = triangle()
    with tempfile.TemporaryDirectory() as tmp:
      poly, angle = write_inputs(tmp, instance.polytope, instance.angle)
      output = self.call("verify", "--polytope", poly, "--angle", angle, "--checks", "ds,route")
      self.assertIn("ds", output)
      self.assertNotIn("nonneg", output)
      with self.assertRaises(CommandError) as ctx:
        self.call("verify", "--polytope", poly, "--angle", angle, "--checks", "nope")
      self.assertEqual(ctx.exception.returncode, 3)
      with self.assertRaises(CommandError):
        self.call("verify", "--polytope", poly, "--angle", angle, "--checks", "middle")

  def test_angle_file_rejects_sampling_options(self):
    instance = triangle()
    with tempfile.TemporaryDirectory() as tmp:
      poly, angle = write_inputs(tmp, instance.polytope, instance.angle)
      for extra in (["--samples", "100"], ["--seed", "4"]):
        with self.subTest(extra[0]), self.assertRaises(CommandError) as ctx:
          self.call("analyze", "--polytope", poly, "--angle", angle, *extra)
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn("E_PARSE", str(ctx.exception))

  def test_missing_polytope(self):
    with self.assertRaises(CommandError) as ctx:
      self.call("analyze")
    self.assertIn("E_", str(ctx.exception))

  def test_search_campaign_records_nothing_by_default(self):
    data = json.loads(self.call("search", "--mode", "random-verify", "--dim", "3", "--vertices", "5", "--max-iter", "2", "--seed", "3", "--format", "json"))
    self.assertEqual(data["instances"], 2)
    self.assertEqual(SearchFinding.objects.count(), 0)

  def test_search_flatten(self):
    data = json.loads(self.call("search", "--mode", "flatten", "--samples", "2000", "--seed", "3", "--max-iter", "1", "--format", "json"))
    self.assertEqual(len(data["steps"]), 1)
    self.assertIsNotNone(data["reference"])
    self.assertIn(data["closer_to"], ("gamma_hat", "double_gamma_hat"))

  def test_exhausted_search_exits_with_failure(self):
    with self.assertRaises(CommandError) as ctx:
      self.call("search", "--mode", "one-dark-facet-projective", "--max-iter", "0")
    self.assertEqual(ctx.exception.returncode, 1)


class ConsoleEntryPointTests(SimpleTestCase):
  def test_exit_codes(self):
    self.assertEqual(run(["example", "--name", "triangle", "--format", "json", "--out", "/dev/null"]), 0)
    self.assertEqual(run(["frobnicate"]), 2)
    self.assertEqual(run(["example", "--name", "nope"]), 3)
    self.assertEqual(run(["search", "--mode", "one-dark-facet-projective", "--max-iter", "0"]), 1)


class RandomPolytopeTests(SimpleTestCase):
  def test_random_polytopes_are_reproducible(self):
    p = random_simplicial_polytope(3, 6, 11)
    q = random_simplicial_polytope(3, 6, 11)
    self.assertEqual(p.vertices, q.vertices)
    self.assertEqual(p.vertex_count, 6)
    self.assertTrue(is_simplicial(p))
    self.assertTrue(all(abs(a) <= 100 and a.denominator == 1 for v in p.vertices for a in v))
    with self.assertRaises(PreconditionError):
      random_simplicial_polytope(3, 3, 11)

  @override_settings(ANGLEVEC={"RANDOM_RETRIES": 0})
  def test_retries_run_out(self):
    with self.assertRaises(SearchExhausted):
      random_simplicial_polytope(2, 4, 1)

  def test_search_config_validation(self):
    with self.assertRaises(PreconditionError):
      SearchConfig(1, 4, 0, 1)
    with self.assertRaises(PreconditionError):
      SearchConfig(3, 3, 0, 1)
    with self.assertRaises(PreconditionError):
      SearchConfig(3, 5, 0, -1)


class FlatteningTests(SimpleTestCase):
  def test_flatten_keeps_combinatorics(self):
    p = get_example("nonunimodal6").build().polytope
    flat = flatten(p, "1/100")
    self.assertTrue(combinatorics_preserved(p, flat))
    self.assertEqual(flat.vertices[0][0], Fraction(-48, 100))
    with self.assertRaises(PreconditionError):
      flatten(p, 0)
    with self.assertRaises(PreconditionError):
      flatten(p, "1/2", axis=6)

  def test_flattening_experiment_reports_the_limit(self):
    instance = get_example("nonunimodal6").build()
    experiment = flattening_experiment(instance.polytope, ["1/10", "1/100"], spherical_model(1500, 8), reference=instance.angle)
    self.assertEqual([s.eps for s in experiment.steps], [Fraction(1, 10), Fraction(1, 100)])
    self.assertTrue(all(s.estimated for s in experiment.steps))
    self.assertEqual(experiment.reference.entries, (0, 0, 2, Fraction(5, 2), 2, 3, 1))
    self.assertIn(experiment.closer_to, ("gamma_hat", "double_gamma_hat"))
    self.assertIsNone(flattening_experiment(instance.polytope, ["1/10"], instance.angle).closer_to)


class SearchTests(SimpleTestCase):
  def test_projective_search_finds_one_dark_facet(self):
    found = projective_one_dark_facet_search(cross_polytope(4), 7, 200)
    arr = build_arrangement(found.polytope)
    self.assertEqual(bin(arr.dark_mask(found.region)).count("1"), 1)
    self.assertTrue(combinatorics_preserved(cross_polytope(4), found.polytope))
    self.assertEqual(found.antipode.key, found.region.key.translate(str.maketrans("+-", "-+")))

  def test_search_without_iterations(self):
    with self.assertRaises(SearchExhausted) as ctx:
      projective_one_dark_facet_search(cross_polytope(4), 7, 0)
    self.assertEqual(ctx.exception.details["iterations"], 0)

  def test_verify_campaign(self):
    summary = random_verify_campaign(SearchConfig(3, 6, 5, 4))
    self.assertEqual(summary.instances, 4)
    self.assertGreaterEqual(summary.max_regions, 1)
    self.assertEqual(summary.as_dict()["mode"], "random-verify")

  def test_random_simplices_pass_over_every_region(self):
    for d in range(2, 7):
      with self.subTest(d=d):
        p = random_simplicial_polytope(d, d + 1, 100 + d)
        regions = enumerate_regions(build_arrangement(p))
        self.assertEqual(len(regions), 2 ** (d + 1) - 2)
        model = RegionWeights.of({r.key: Fraction(1, len(regions)) for r in regions})
        report = analyze_weights(p, evaluate(model, build_arrangement(p)), all_regions=True)
        self.assertEqual(report.status, Status.PASS)
        self.assertEqual(report.check("simplex-law").status, Status.PASS)
        self.assertEqual(report.arrangement["examined"], len(regions))

  def test_campaign_up_to_dimension_five(self):
    summary = random_verify_campaign(SearchConfig(5, 7, 42, 30))
    self.assertEqual(summary.instances, 30)
    self.assertGreater(summary.regions, summary.instances)

  @override_settings(ANGLEVEC={"ENUMERATION_LIMIT": 0})
  def test_point_mass_campaign_checks_every_region(self):
    summary = random_verify_campaign(SearchConfig(2, 3, 13, 4))
    self.assertEqual(summary.instances, 4)
    self.assertEqual(summary.regions, 4 * 6)
    self.assertEqual(summary.max_regions, 6)

  def test_planar_campaign_with_even_models(self):
    # odd iterations draw antipodally symmetric weights
    summary = random_verify_campaign(SearchConfig(2, 6, 21, 8))
    self.assertEqual(summary.instances, 8)
    self.assertEqual(summary.findings, [])

  def test_non_unimodal_search_is_reproducible(self):
    cfg = SearchConfig(3, 6, 9, 3, Mode.NON_UNIMODAL)
    first, again = non_unimodal_search(cfg), non_unimodal_search(cfg)
    self.assertEqual(first.as_dict(), again.as_dict())
    self.assertEqual(first.instances, 3)


class ExampleRegistryTests(SimpleTestCase):
  def test_registry(self):
    names = [spec.name for spec in example_registry()]
    self.assertEqual(len(names), len(set(names)))
    self.assertIn("bipyramid4", names)
    with self.assertRaises(InputError):
      get_example("nope")

  def test_cross_polytope_and_nonunimodal_counts(self):
    cross = cross_polytope(4)
    self.assertEqual(len(cross.facets), 16)
    self.assertEqual(f_vector(cross.lattice).entries, (1, 8, 24, 32, 16))
    self.assertEqual(build_arrangement(cross).size, 8)
    p = get_example("nonunimodal6").build().polytope
    self.assertEqual(len(p.facets), 21)
    self.assertEqual(f_vector(p.lattice)[5], 21)

  def test_exact_examples_match(self):
    for name in ("triangle", "pentagon", "cross4", "bipyramid3", "bipyramid5", "simplex4"):
      with self.subTest(name):
        outcome = run_example(get_example(name))
        self.assertEqual(outcome.mismatches, [])
        self.assertEqual(outcome.report.status, Status.PASS)

  def test_equilateral_estimate(self):
    outcome = run_example(get_example("equilateral"), samples=4000, seed=5)
    self.assertTrue(outcome.matched, outcome.mismatches)
    self.assertTrue(outcome.report.estimated)
