import os
from dataclasses import dataclass

DEFAULT_P_MIN = 1e-4


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances shared by all scalar solvers."""

    residual_tol: float = 1e-12
    max_iter: int = 200
    # Newton falls back to this many bisection steps after two clipped steps
    bisection_burst: int = 5
    # below this gap |phi - theta| the tangency solver uses pure bisection
    ill_conditioned_gap: float = 1e-6
    # series switch for sin(d/2)/d**p
    series_gap: float = 1e-4


CONFIG = SolverConfig()


def p_floor():
    """Smallest exponent explored numerically; ``QSLKIT_P_MIN`` overrides it."""
    raw = os.environ.get("QSLKIT_P_MIN")
    if raw is None or raw == "":
        return DEFAULT_P_MIN
    value = float(raw)
    if not 0.0 < value < 2.0:
        raise ValueError(f"QSLKIT_P_MIN must lie in (0, 2), got {raw!r}")
    return value
