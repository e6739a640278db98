from django.contrib import admin
from django.urls import path
from core.views import health, run_report

urlpatterns = [
  path("admin/", admin.site.urls),
  path("health/", health),
  path("runs/<int:run_id>/", run_report),
]
