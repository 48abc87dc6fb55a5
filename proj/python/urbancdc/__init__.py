"""Urban CDC placement and cooperative caching simulator."""

from ._urbancdc import (
    Config,
    InputError,
    ParseError,
    ValidationError,
    beta_from_s,
    haversine_m,
    mle_estimate_s,
    place,
    policies,
    simulate,
    sweep,
    topology,
    zipf_pmf,
)

__all__ = [
    "Config",
    "InputError",
    "ParseError",
    "ValidationError",
    "beta_from_s",
    "haversine_m",
    "mle_estimate_s",
    "place",
    "policies",
    "simulate",
    "sweep",
    "topology",
    "zipf_pmf",
]
