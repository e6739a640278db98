"""JSON formats for polytopes, angle models and analysis reports.

Rationals are strings ("-48", "5/6"); vectors carry their first index.
Output is canonical: sorted keys, fixed indentation.
"""

from __future__ import annotations

import enum
import json
from fractions import Fraction
from pathlib import Path

from analysis.angles import AngleModel, Atom, PointMasses, RegionWeights, SphericalMC
from analysis.anglevec import AnalysisReport, CheckResult
from analysis.vectors import IndexedVector
from geometry.exact import format_rational, to_rational
from geometry.exceptions import DimensionMismatch, InputError
from geometry.polytope import VPolytope


def read_json(path: str | Path) -> dict:
  try:
    return json.loads(Path(path).read_text())
  except FileNotFoundError as exc:
    raise InputError(f"No such file: {path}") from exc
  except json.JSONDecodeError as exc:
    raise InputError(f"{path} is not valid JSON: {exc}") from exc


def canonical(data) -> str:
  return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def plain(value):
  """Convert library values into JSON-ready primitives."""
  if isinstance(value, bool) or value is None or isinstance(value, str):
    return value
  if isinstance(value, (int, Fraction)):
    return format_rational(value)
  if isinstance(value, enum.Enum):
    return value.value
  if isinstance(value, IndexedVector):
    return {"first_index": value.first_index, "entries": [format_rational(a) for a in value.entries]}
  if isinstance(value, dict):
    return {str(k): plain(v) for k, v in value.items()}
  if isinstance(value, (list, tuple, set, frozenset)):
    items = sorted(value) if isinstance(value, (set, frozenset)) else value
    return [plain(v) for v in items]
  return str(value)


# Polytopes.


def load_polytope(data: dict, name: str = "") -> VPolytope:
  try:
    dim = data["dim"]
    rows = data["vertices"]
  except (KeyError, TypeError) as exc:
    raise InputError("Polytope JSON needs 'dim' and 'vertices'") from exc
  if not isinstance(dim, int) or isinstance(dim, bool):
    raise InputError("'dim' must be an integer")
  vertices = tuple(tuple(to_rational(c) for c in row) for row in rows)
  if any(len(v) != dim for v in vertices):
    raise DimensionMismatch(f"Every vertex must have {dim} coordinates")
  return VPolytope(dim, vertices, name or data.get("name", ""))


def dump_polytope(p: VPolytope) -> dict:
  data = {"dim": p.dim, "vertices": [[format_rational(c) for c in v] for v in p.vertices]}
  if p.name:
    data["name"] = p.name
  return data


# Angle models.


def load_angle(data: dict) -> AngleModel:
  kind = data.get("type") if isinstance(data, dict) else None
  try:
    if kind == "point_masses":
      return PointMasses(
        tuple(Atom(tuple(to_rational(c) for c in a["ray"]), to_rational(a["weight"])) for a in data["atoms"])
      )
    if kind == "region_weights":
      return RegionWeights(tuple(sorted((key, to_rational(w)) for key, w in data["weights"].items())))
    if kind == "spherical_mc":
      return SphericalMC(int(data["samples"]), int(data["seed"]), int(data.get("workers", 1)))
  except (KeyError, TypeError, AttributeError) as exc:
    raise InputError(f"Malformed {kind} angle model: {exc}") from exc
  raise InputError(f"Unknown angle model type {kind!r}")


def dump_angle(model: AngleModel) -> dict:
  if isinstance(model, PointMasses):
    return {
      "type": "point_masses",
      "atoms": [{"ray": [format_rational(c) for c in a.ray], "weight": format_rational(a.weight)} for a in model.atoms],
    }
  if isinstance(model, RegionWeights):
    return {"type": "region_weights", "weights": {k: format_rational(w) for k, w in model.weights}}
  data = {"type": "spherical_mc", "samples": model.samples, "seed": model.seed}
  if model.workers != 1:
    data["workers"] = model.workers
  return data


# Reports.


def dump_check(check: CheckResult) -> dict:
  return {"name": check.name, "status": check.status.value, "witness": plain(check.witness)}


def dump_report(report: AnalysisReport) -> dict:
  return {
    "polytope_id": report.polytope_id,
    "dim": report.dim,
    "vertex_count": report.vertex_count,
    "simplicial": report.simplicial,
    "arrangement": report.arrangement,
    "approximate": report.estimated,
    "samples": report.samples,
    "regions": [
      {
        "key": r.key,
        "weight": format_rational(r.weight),
        "f_dark": plain(r.f_dark),
        "h_dark": plain(r.h_dark),
        "f_shadow": plain(r.f_shadow),
        "g_shadow": plain(r.g_shadow),
      }
      for r in report.regions
    ],
    "f_boundary": plain(report.f_boundary),
    "h_boundary": plain(report.h_boundary),
    "alpha_hat": plain(report.alpha_hat),
    "alpha_hat_reflected": plain(report.alpha_hat_reflected),
    "gamma_hat": plain(report.gamma_hat),
    "gamma_hat_reflected": plain(report.gamma_hat_reflected),
    "properties": plain(report.properties),
    "checks": [dump_check(c) for c in report.checks],
    "status": report.status.value,
  }
