"""Persisting analysis reports and search findings."""

from __future__ import annotations

import logging

from django.db import transaction

from analysis.angles import AngleModel
from analysis.anglevec import AnalysisReport
from analysis.codec import dump_angle, dump_polytope, dump_report, plain
from geometry.polytope import VPolytope

from .models import AnalysisRun, SearchFinding

logger = logging.getLogger(__name__)


@transaction.atomic
def record_analysis(name: str, polytope: VPolytope, model: AngleModel | None, report: AnalysisReport) -> AnalysisRun:
  run = AnalysisRun(
    name=name or report.polytope_id,
    dimension=polytope.dim,
    vertex_count=polytope.vertex_count,
    polytope=dump_polytope(polytope),
    angle=dump_angle(model) if model is not None else {},
    report=dump_report(report),
    status=report.status.value,
  )
  run.full_clean()
  run.save()
  logger.info("Recorded analysis run %s for %s", run.id, run.name or "polytope")
  return run


@transaction.atomic
def record_finding(
  mode: str,
  seed: int,
  iteration: int,
  polytope: VPolytope,
  weights: dict,
  gamma_hat,
  kind: str,
  notes: str = "",
) -> SearchFinding:
  finding, created = SearchFinding.objects.update_or_create(
    mode=mode,
    seed=seed,
    iteration=iteration,
    kind=kind,
    defaults={
      "dimension": polytope.dim,
      "polytope": dump_polytope(polytope),
      "weights": plain(weights),
      "gamma_hat": plain(list(gamma_hat)) if gamma_hat is not None else [],
      "notes": notes,
    },
  )
  logger.info("%s search finding %s (%s, seed %d, iteration %d)", "Recorded" if created else "Updated", kind, mode, seed, iteration)
  return finding
