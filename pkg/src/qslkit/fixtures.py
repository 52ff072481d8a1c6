"""Built-in Table I states and their published reference values."""

import math
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .spectrum import DiscreteSpectrum, build_state

CASE_IDS = ("a", "b", "c", "d", "e", "f", "g")


def _uniform_2048():
    return build_state([(float(j), 1.0 / 2048.0) for j in range(2048)], name="b")


def _power_2048():
    j = np.arange(1, 2049, dtype=float)
    w = 1.0 / j**2
    return build_state(list(zip(j, w / w.sum())), name="c")


_BUILDERS = {
    "a": lambda: build_state([(0.0, 0.5), (1.0, 0.5)], name="a"),
    "b": _uniform_2048,
    "c": _power_2048,
    "d": lambda: build_state([(0.0, 0.1), (1.0, 0.9)], name="d"),
    "e": lambda: build_state([(0.0, 0.3), (1.0, 0.6), (2.0, 0.1)], name="e"),
    "f": lambda: build_state([(0.0, 0.3), (1.0, 0.6), (math.pi, 0.1)], name="f"),
    "g": lambda: build_state([(0.0, 0.4), (1.0, 0.45), (2.0 * math.pi, 0.15)], name="g"),
}


@lru_cache(maxsize=None)
def case_state(case_id) -> DiscreteSpectrum:
    try:
        return _BUILDERS[case_id]()
    except KeyError:
        raise ValidationError(f"unknown builtin case {case_id!r}; expected one of {CASE_IDS}") \
            from None


# Printed cells as strings so the number of printed digits is known.
# Column order: MT, ML, LZ, LZ p, LC, LC p, CZ, CZ p, CZ theta.  "inf" marks a
# divergent entry, "0*" an exponent printed for a divergent entry.
TABLE1_ROWS = (
    ("a", "0", "3.1416", "3.1416", "3.1416", "1.78", "3.1416", "1.2e-5",
     "3.1416", "8.8e-4", "-5.6e-4"),
    ("b", "0", "2.66e-3", "1.53e-3", "1.88e-3", "2.00", "2.84e-3", "1.36",
     "2.84e-3", "1.36", "0.00"),
    ("c", "0", "0.0353", "0.2181", "0.4166", "0.46", "0.3961", "0.44",
     "0.4166", "0.42", "-0.28"),
    ("d", "0.1", "4.9021", "1.5432", "2.1437", "2.00", "12.4204", "1.00",
     "12.4204", "1.00", "0.00"),
    ("e", "0.19", "2.2994", "1.5397", "1.8485", "2.00", "inf", "0*",
     "inf", "0*", "0*"),
    ("e", "0.20", "2.2824", "1.5183", "1.8268", "2.00", "3.1416", "1.3e-5",
     "3.1416", "1.3e-5", "2.9e-6"),
    ("f", "0.20", "1.5800", "1.3287", "1.4586", "1.75", "2.5970", "1.2e-5",
     "2.5970", "1.0e-5", "2.2e-6"),
    ("g", "0.00", "0.7461", "1.1281", "1.1795", "0.67", "1.3401", "0.46",
     "1.3410", "0.46", "0.03"),
    ("g", "0.15", "0.6746", "0.9342", "0.9323", "0.89", "1.0211", "0.73",
     "1.0221", "0.74", "-0.04"),
    ("g", "0.35", "0.5762", "0.6932", "0.6641", "1.12", "0.7525", "1.02",
     "0.7577", "1.00", "-0.10"),
    ("g", "0.99", "0.0672", "0.0099", "2.7e-14", "0.19", "0.0674", "1.99",
     "0.0674", "1.99", "0.00"),
)

COLUMNS = ("MT", "ML", "LZ", "LC", "CZ")


def reference_cells():
    """Yield ``(case, sqrt_eps_str, column, value_str, p_str, theta_str)``."""
    for row in TABLE1_ROWS:
        case, se, mt, ml, lz, lzp, lc, lcp, cz, czp, czt = row
        yield case, se, "MT", mt, None, None
        yield case, se, "ML", ml, None, None
        yield case, se, "LZ", lz, lzp, None
        yield case, se, "LC", lc, lcp, None
        yield case, se, "CZ", cz, czp, czt


_C_NOTE = ("the state defined in the caption (weights proportional to 1/j^2 on E = 1..2048) "
           "gives MT 0.04496 and ML 0.3939 and a divergent small-p limit (r0 = 1.276); "
           "its fidelity never drops below 0.216, so no finite evolution time exists")
_D_NOTE = ("small-p ratio r0 = 4.5 > 1 makes the optimized bound divergent; the fidelity of "
           "this state never falls below 0.8, so sqrt(eps) = 0.1 is unreachable; the printed "
           "value is the p = 1 Chau bound")

# Cells whose printed values cannot be reproduced from the stated inputs.
KNOWN_CONFLICTS = {
    ("c", "0", "MT"): _C_NOTE,
    ("c", "0", "ML"): _C_NOTE,
    ("c", "0", "LZ"): _C_NOTE,
    ("c", "0", "LC"): _C_NOTE,
    ("c", "0", "CZ"): _C_NOTE,
    ("d", "0.1", "LC"): _D_NOTE,
    ("d", "0.1", "CZ"): _D_NOTE,
}
