from django.http import JsonResponse
from django.shortcuts import get_object_or_404

from .models import AnalysisRun

def health(request):
  return JsonResponse({ "status": "ok" })


def run_report(request, run_id):
  run = get_object_or_404(AnalysisRun, id=run_id)
  return JsonResponse({
    "id": run.id,
    "name": run.name,
    "status": run.status,
    "created_at": run.created_at.isoformat(),
    "report": run.report,
  })
