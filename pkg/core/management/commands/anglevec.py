from __future__ import annotations

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from analysis.anglevec import CHECK_NAMES, AnalysisReport, Status, analyze
from analysis.codec import canonical, dump_check, dump_polytope, dump_report, load_angle, load_polytope, plain, read_json
from analysis.shadow import shadow_decomposition, relative_f_vector
from analysis.vectors import IndexedVector
from core.examples import cross_polytope, example_registry, get_example, run_example
from core.records import record_analysis, record_finding
from core.search import (
  Mode,
  SearchConfig,
  flattening_experiment,
  non_unimodal_search,
  projective_one_dark_facet_search,
  random_verify_campaign,
  spherical_model,
)
from geometry.arrangement import build_arrangement, enumerate_regions
from geometry.conf import setting
from geometry.exceptions import AnglevecError, CheckFailure, InputError, SearchExhausted
from geometry.polytope import VPolytope

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("analyze", "regions", "verify", "example", "search")

EXIT_FAILED = 1
EXIT_INPUT = 3


class Command(BaseCommand):
  help = "Compute alpha-hat and gamma-hat vectors of polytopes and verify their theorems"

  def add_arguments(self, parser):
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--polytope", help="Polytope JSON file")
    parser.add_argument("--angle", help="Angle model JSON file")
    parser.add_argument("--name", help="Example name, or 'all'")
    parser.add_argument("--checks", help="Comma-separated check names for verify")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--max-iter", dest="max_iter", type=int, default=50)
    parser.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.RANDOM_VERIFY.value)
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--vertices", type=int, default=7)
    parser.add_argument("--out", help="Write output here instead of stdout")
    parser.add_argument("--format", dest="fmt", choices=["json", "text"], default="text")
    parser.add_argument("--record", action="store_true", help="Store results in the database")

  def handle(self, *args, **opts):
    action = opts["subcommand"]
    try:
      getattr(self, f"do_{action}")(opts)
    except CheckFailure as exc:
      raise CommandError(f"{exc.code}: {exc}", returncode=EXIT_FAILED) from exc
    except SearchExhausted as exc:
      raise CommandError(f"{exc.code}: {exc}", returncode=EXIT_FAILED) from exc
    except AnglevecError as exc:
      raise CommandError(f"{exc.code}: {exc}", returncode=EXIT_INPUT) from exc

  # Input and output.

  def _polytope(self, opts, required=True) -> VPolytope | None:
    path = opts.get("polytope")
    if not path:
      if required:
        raise InputError("--polytope is required")
      return None
    return load_polytope(read_json(path), name=Path(path).stem)

  def _angle(self, opts):
    path = opts.get("angle")
    if path:
      given = [flag for flag in ("samples", "seed") if opts.get(flag) is not None]
      if given:
        raise InputError(f"--{given[0]} only applies to the sampled model, not to --angle", options=given)
      return load_angle(read_json(path))
    return spherical_model(opts.get("samples"), opts.get("seed"))

  def _emit(self, opts, text: str, data):
    body = canonical(data) if opts["fmt"] == "json" else text
    if opts.get("out"):
      Path(opts["out"]).write_text(body)
      logger.info("Wrote %s", opts["out"])
    else:
      self.stdout.write(body, ending="" if body.endswith("\n") else "\n")

  def _status_line(self, status: Status) -> str:
    style = self.style.ERROR if status is Status.FAIL else self.style.SUCCESS
    return style(f"status: {status.value}")

  def _report_text(self, report: AnalysisReport) -> str:
    kind = "simplicial" if report.simplicial else "not simplicial"
    lines = [
      f"polytope: {report.polytope_id or '-'} (d={report.dim}, n={report.vertex_count}, {kind})",
      f"arrangement: {report.arrangement['hyperplanes']} hyperplanes, {report.arrangement['support']} weighted regions",
    ]
    if report.estimated:
      lines.append(f"weights estimated from {report.samples} samples")
    vectors = [
      ("f(boundary)", report.f_boundary),
      ("h(boundary)", report.h_boundary),
      ("alpha_hat(P)", report.alpha_hat),
      ("alpha_hat(-P)", report.alpha_hat_reflected),
      ("gamma_hat(P)", report.gamma_hat),
      ("gamma_hat(-P)", report.gamma_hat_reflected),
    ]
    lines += [f"{label}: {vec}    {vec.labelled()}" for label, vec in vectors if vec is not None]
    lines.append("properties: " + ", ".join(f"{k}={plain(v)}" for k, v in sorted(report.properties.items())))
    lines.append("checks:")
    lines += [f"  {c.name:<20} {c.status.value}" for c in report.checks]
    lines.append(self._status_line(report.status))
    return "\n".join(lines)

  # Subcommands.

  def do_analyze(self, opts):
    p = self._polytope(opts)
    model = self._angle(opts)
    report = analyze(p, model, name=p.name)
    if opts["record"]:
      record_analysis(p.name, p, model, report)
    self._emit(opts, self._report_text(report), dump_report(report))

  def do_regions(self, opts):
    p = self._polytope(opts)
    arr = build_arrangement(p)
    rows = []
    for region in enumerate_regions(arr):
      parts = shadow_decomposition(p, region)
      rows.append({
        "key": region.key,
        "witness": [str(a) for a in region.witness],
        "dark_facets": bin(arr.dark_mask(region)).count("1"),
        "f_dark": plain(relative_f_vector(parts.dark)),
      })
    text = [f"{arr.size} hyperplanes, {len(rows)} regions"]
    text += [
      f"  {row['key']}  witness=({', '.join(row['witness'])})  dark facets={row['dark_facets']}"
      for row in rows
    ]
    self._emit(opts, "\n".join(text), {"hyperplanes": arr.size, "regions": rows})

  def do_verify(self, opts):
    p = self._polytope(opts)
    wanted = [c.strip() for c in (opts.get("checks") or "").split(",") if c.strip()]
    unknown = sorted(set(wanted) - set(CHECK_NAMES))
    if unknown:
      raise InputError(f"Unknown checks: {', '.join(unknown)}")
    report = analyze(p, self._angle(opts), name=p.name)
    selected = [c for c in report.checks if not wanted or c.name in wanted]
    missing = [name for name in wanted if report.check(name) is None]
    if missing:
      raise InputError(f"Checks not applicable to this input: {', '.join(missing)}")

    text = "\n".join(f"{c.name:<20} {c.status.value}" for c in selected)
    self._emit(opts, text, {"checks": [dump_check(c) for c in selected]})
    failed = [c.name for c in selected if not c.passed]
    if failed:
      raise CheckFailure(f"Failed checks: {', '.join(failed)}")

  def do_example(self, opts):
    name = opts.get("name")
    if not name:
      raise InputError("--name is required (or 'all')")
    specs = example_registry() if name == "all" else (get_example(name),)
    blocks, payload, failures = [], [], []
    for spec in specs:
      build_options = {}
      if spec.approximate:
        build_options = {"samples": opts.get("samples"), "seed": opts.get("seed")}
      outcome = run_example(spec, **build_options)
      if opts["record"]:
        record_analysis(spec.name, outcome.instance.polytope, outcome.instance.angle, outcome.report)
      lines = [f"example {spec.name}: {spec.description}"]
      for key, value in sorted(outcome.actual.items()):
        if key in spec.expected or key in spec.region_expected:
          lines.append(f"  {key} = {IndexedVector(tuple(value))}")
      if "unimodal" in outcome.report.properties and not outcome.report.properties["unimodal"]:
        lines.append("  gamma_hat is NOT unimodal")
      if outcome.matched:
        lines.append(self.style.SUCCESS("  matched"))
      else:
        failures.append(spec.name)
        lines += [self.style.ERROR(f"  mismatch: {m}") for m in outcome.mismatches]
      blocks.append("\n".join(lines))
      payload.append({
        "name": spec.name,
        "matched": outcome.matched,
        "mismatches": outcome.mismatches,
        "actual": plain(outcome.actual),
        "provenance": spec.provenance,
        "report": dump_report(outcome.report),
      })
    self._emit(opts, "\n".join(blocks), payload if name == "all" else payload[0])
    if failures:
      raise CheckFailure(f"Examples did not match: {', '.join(failures)}")

  def do_search(self, opts):
    mode = Mode(opts["mode"])
    seed = opts["seed"] if opts.get("seed") is not None else setting("SEED")

    if mode is Mode.ONE_DARK_FACET:
      p = self._polytope(opts, required=False) or cross_polytope(4)
      found = projective_one_dark_facet_search(p, seed, opts["max_iter"])
      data = {
        "polytope": dump_polytope(found.polytope),
        "region": found.region.key,
        "witness": [str(a) for a in found.region.witness],
        "iterations": found.iterations,
      }
      if opts["record"]:
        record_finding(mode.value, seed, found.iterations, found.polytope, {found.region.key: 1}, None, "one-dark-facet")
      text = f"one-dark-facet region {found.region.key} after {found.iterations} iterations"
      self._emit(opts, text, data)
      return

    if mode is Mode.FLATTEN:
      p = self._polytope(opts, required=False) or get_example("nonunimodal6").build().polytope
      model = spherical_model(opts.get("samples"), seed)
      eps_values = [f"1/{10 ** k}" for k in range(1, max(1, min(opts["max_iter"], 4)) + 1)]
      reference = get_example("nonunimodal6").build().angle if not opts.get("polytope") else None
      experiment = flattening_experiment(p, eps_values, model, reference=reference)
      data = {
        "steps": [{"eps": s.eps, "gamma_hat": s.gamma_hat, "estimated": s.estimated} for s in experiment.steps],
        "reference": experiment.reference,
        "closer_to": experiment.closer_to,
      }
      text = "\n".join(f"eps={s.eps}: gamma_hat={s.gamma_hat}" for s in experiment.steps)
      if experiment.closer_to:
        text += f"\nlimit is closer to {experiment.closer_to} of the point-mass model"
      self._emit(opts, text, plain(data))
      return

    cfg = SearchConfig(opts["dim"], opts["vertices"], seed, opts["max_iter"], mode)
    try:
      summary = random_verify_campaign(cfg) if mode is Mode.RANDOM_VERIFY else non_unimodal_search(cfg)
    except CheckFailure as exc:
      if opts["record"]:
        details = exc.details
        if "polytope" in details:
          failed = load_polytope(details["polytope"])
          record_finding(mode.value, seed, details["iteration"], failed, details.get("weights", {}), None, "failure", notes=str(exc))
      raise
    if opts["record"]:
      for finding in summary.findings:
        record_finding(mode.value, seed, finding.iteration, finding.polytope, finding.weights, finding.gamma_hat, finding.kind)
    text = (
      f"{summary.instances} instances, {summary.regions} regions examined, "
      f"largest {summary.max_regions}, {len(summary.findings)} non-unimodal"
    )
    self._emit(opts, text, summary.as_dict())
