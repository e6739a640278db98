from django.conf import settings

DEFAULTS = {
  "MC_SAMPLES": 1_000_000,
  "MC_WORKERS": 1,
  "MC_SCALE_BITS": 20,
  "SEED": 42,
  "SHELLING_ATTEMPTS": 8,
  "BOX_SIDE": 200,
  "RANDOM_RETRIES": 200,
  "ENUMERATION_LIMIT": 14,
}


def setting(name: str):
  """Return an ANGLEVEC setting, falling back to the built-in default."""
  if name not in DEFAULTS:
    raise KeyError(f"Unknown anglevec setting {name!r}")
  overrides = getattr(settings, "ANGLEVEC", None) or {}
  return overrides.get(name, DEFAULTS[name])
