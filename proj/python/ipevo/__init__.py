"""Interval-partition evolutions built from spindles (C++ core)."""
import json as _json

from . import _ipevo
from ._ipevo import InadmissibleSpec, UsageError, dprime, dprime_bruteforce, dprime_truncated, experiment_names


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def check(config):
    """Condition report for the configured model, as a dict."""
    return _json.loads(_ipevo.check(_text(config)))


def experiment(name, config, out_dir=""):
    """Run a named experiment; returns the summary dict (results, pass)."""
    return _json.loads(_ipevo.experiment(name, _text(config), out_dir))


def spindle(config, index=0):
    """One spindle from the truncated excursion law: (times, values, amplitude, lifetime)."""
    return _ipevo.spindle(_text(config), index)


def simulate_levels(config):
    """Skewer widths at each configured level of a simulated run."""
    return _ipevo.simulate_levels(_text(config))


def scale(config, x):
    return _ipevo.scale(_text(config), x)


def speed_mass(config, lo, hi):
    return _ipevo.speed_mass(_text(config), lo, hi)


def amplitude_tail(config, a, w):
    return _ipevo.amplitude_tail(_text(config), a, w)


def lifetime_tail(config, z):
    return _ipevo.lifetime_tail(_text(config), z)


__all__ = [
    "InadmissibleSpec", "UsageError", "amplitude_tail", "check", "dprime", "dprime_bruteforce",
    "dprime_truncated", "experiment", "experiment_names", "lifetime_tail", "scale", "simulate_levels",
    "speed_mass", "spindle",
]
