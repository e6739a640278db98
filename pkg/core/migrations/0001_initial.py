# Generated by Django 5.2.9 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="AnalysisRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("updated_at", models.DateTimeField(auto_now=True)),
                ("name", models.CharField(blank=True, max_length=255)),
                ("dimension", models.PositiveSmallIntegerField()),
                ("vertex_count", models.PositiveIntegerField()),
                ("polytope", models.JSONField(default=dict)),
                ("angle", models.JSONField(blank=True, default=dict)),
                ("report", models.JSONField(default=dict)),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("pass", "Pass"),
                            ("fail", "Fail"),
                            ("approx-pass", "Approximate pass"),
                        ],
                        default="pass",
                        max_length=16,
                    ),
                ),
            ],
            options={
                "ordering": ["-created_at"],
            },
        ),
        migrations.CreateModel(
            name="SearchFinding",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("updated_at", models.DateTimeField(auto_now=True)),
                ("mode", models.CharField(max_length=32)),
                (
                    "kind",
                    models.CharField(
                        choices=[
                            ("non-unimodal", "Non-unimodal gamma-hat"),
                            ("one-dark-facet", "One dark facet"),
                            ("failure", "Check failure"),
                        ],
                        max_length=32,
                    ),
                ),
                ("seed", models.BigIntegerField()),
                ("iteration", models.PositiveIntegerField(default=0)),
                ("dimension", models.PositiveSmallIntegerField()),
                ("polytope", models.JSONField(default=dict)),
                ("weights", models.JSONField(blank=True, default=dict)),
                ("gamma_hat", models.JSONField(blank=True, default=list)),
                ("notes", models.TextField(blank=True)),
            ],
            options={
                "ordering": ["-created_at"],
                "constraints": [
                    models.UniqueConstraint(
                        fields=("mode", "seed", "iteration", "kind"),
                        name="searchfinding_unique_per_iteration",
                    )
                ],
            },
        ),
    ]
