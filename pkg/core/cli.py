"""Console entry point: `anglevec <subcommand> ...` without going through manage.py."""

import os
import sys


def run(argv=None) -> int:
  """Run the anglevec command and return its exit code."""
  os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
  import django
  from django.apps import apps

  if not apps.ready:
    django.setup()

  from core.management.commands.anglevec import Command

  argv = list(sys.argv[1:] if argv is None else argv)
  try:
    Command().run_from_argv(["manage.py", "anglevec", *argv])
  except SystemExit as exc:
    if exc.code is None:
      return 0
    return exc.code if isinstance(exc.code, int) else 1
  return 0


def main():
  sys.exit(run())


if __name__ == "__main__":
  main()
