from django.contrib import admin
from .models import AnalysisRun, SearchFinding


@admin.register(AnalysisRun)
class AnalysisRunAdmin(admin.ModelAdmin):
  list_display = ("name", "dimension", "vertex_count", "status", "created_at")
  list_filter = ("status", "dimension")
  search_fields = ("name",)
  readonly_fields = ("created_at", "updated_at")


@admin.register(SearchFinding)
class SearchFindingAdmin(admin.ModelAdmin):
  list_display = ("kind", "mode", "seed", "iteration", "dimension", "created_at")
  list_filter = ("kind", "mode", "dimension")
  search_fields = ("mode", "notes")
