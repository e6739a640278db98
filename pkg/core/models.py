from django.core.exceptions import ValidationError
from django.db import models


class TimeStampedModel(models.Model):
  created_at = models.DateTimeField(auto_now_add=True)
  updated_at = models.DateTimeField(auto_now=True)

  class Meta:
    abstract = True


class AnalysisRun(TimeStampedModel):
  class Status(models.TextChoices):
    PASS = "pass", "Pass"
    FAIL = "fail", "Fail"
    APPROX = "approx-pass", "Approximate pass"

  name = models.CharField(max_length=255, blank=True)
  dimension = models.PositiveSmallIntegerField()
  vertex_count = models.PositiveIntegerField()
  polytope = models.JSONField(default=dict)
  angle = models.JSONField(default=dict, blank=True)
  report = models.JSONField(default=dict)
  status = models.CharField(max_length=16, choices=Status.choices, default=Status.PASS)

  class Meta:
    ordering = ["-created_at"]

  def expected_status(self) -> str:
    statuses = {check.get("status") for check in self.report.get("checks", [])}
    if self.Status.FAIL in statuses:
      return self.Status.FAIL
    if self.Status.APPROX in statuses:
      return self.Status.APPROX
    return self.Status.PASS

  def clean(self):
    super().clean()
    if self.status != self.expected_status():
      raise ValidationError(
        {"status": f"Report checks give {self.expected_status()}, not {self.status}."}
      )
    if self.report.get("dim") not in (None, self.dimension):
      raise ValidationError({"dimension": "Dimension disagrees with the stored report."})

  def __str__(self):
    return f"{self.name or 'polytope'} (d={self.dimension}) - {self.status}"


class SearchFinding(TimeStampedModel):
  class Kind(models.TextChoices):
    NON_UNIMODAL = "non-unimodal", "Non-unimodal gamma-hat"
    ONE_DARK_FACET = "one-dark-facet", "One dark facet"
    FAILURE = "failure", "Check failure"

  mode = models.CharField(max_length=32)
  kind = models.CharField(max_length=32, choices=Kind.choices)
  seed = models.BigIntegerField()
  iteration = models.PositiveIntegerField(default=0)
  dimension = models.PositiveSmallIntegerField()
  polytope = models.JSONField(default=dict)
  weights = models.JSONField(default=dict, blank=True)
  gamma_hat = models.JSONField(default=list, blank=True)
  notes = models.TextField(blank=True)

  class Meta:
    ordering = ["-created_at"]
    constraints = [
      models.UniqueConstraint(
        fields=["mode", "seed", "iteration", "kind"],
        name="searchfinding_unique_per_iteration",
      ),
    ]

  def __str__(self):
    return f"{self.get_kind_display()} ({self.mode}, seed {self.seed}, #{self.iteration})"
