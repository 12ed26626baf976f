"""Numerical tolerances and size limits shared across the package."""

import os
from dataclasses import dataclass, field, replace

DEFAULT_MAX_DIM = 64


def _max_dim_from_env() -> int:
    raw = os.environ.get("KDREP_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"KDREP_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 2:
        raise ValueError("KDREP_MAX_DIM must be at least 2")
    return value


@dataclass(frozen=True)
class Config:
    """Tolerances used when validating objects and judging results.

    Attributes:
        atol: absolute tolerance for Hermiticity, trace, positivity and
            Kraus-completeness checks.
        overlap_floor: smallest admissible |<a'_j|a_i>| in a basis pair.
        nonneg_tol: tolerance on -Re and |Im| when judging nonnegativity.
        max_dim: cap on the total Hilbert-space dimension of any object.
    """

    atol: float = 1e-9
    overlap_floor: float = 1e-8
    nonneg_tol: float = 1e-9
    max_dim: int = field(default_factory=_max_dim_from_env)

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


def default_config() -> Config:
    # re-read the environment on every call so the CLI picks up overrides
    return Config()
