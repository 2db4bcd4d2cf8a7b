"""Published reference values used by tests, the CLI and the acceptance suite."""
from __future__ import annotations

from math import sqrt

from .polynomial import Polynomial
from .template import generic_cubic_template  # re-exported

# Record deltas per deg x, with the winning configuration (rounded to 7 places).
FIGURE1 = {
    4: ("[1],[],[]", 0.9510565),
    6: ("[2],[1],[]", 0.9629740),
    8: ("[3],[1],[1]", 0.9702883),
    10: ("[3,1],[2],[1]", 0.9744993),
    12: ("[3,2],[2,1],[1]", 0.9764615),
    14: ("[3,2,1],[2,1],[2]", 0.9783838),
    16: ("[3,2,1,1],[2,2],[2]", 0.9794385),
    18: ("[3,2,2,1],[2,2],[2,1]", 0.9802345),
    20: ("[4,2,2,1],[3,2],[2,2,1]", 0.9808348),
}

# Closed forms for the two smallest cases.
CUBIC_DELTA = sqrt(2 + sqrt(2)) / 2            # largest root of 8 d^4 - 8 d^2 + 1
QUARTIC_DELTA = sqrt(10 + 2 * sqrt(5)) / 4     # largest root of 16 d^4 - 20 d^2 + 5
GOLDEN = (sqrt(5) + 1) / 2


def cubic_solution(delta: float = CUBIC_DELTA) -> dict:
    return {"delta": delta, "A": 2 * delta, "B": 4 * delta**2 - 1,
            "C": 4 * delta**3 - 2 * delta, "k": 4 * delta**3 - 2 * delta}


QUARTIC_SOLUTION = {"delta": QUARTIC_DELTA, "A1": GOLDEN, "k": GOLDEN}

# Degree-10 winner, seven decimals as printed.
DEG10_CONFIG = "[3,1],[2],[1]"
DEG10_SOLUTION = {
    "delta": 0.9744993,
    "A1": 1.3010813,
    "A2": 0.4475424,
    "B1": 0.5345301,
    "C1": 2.5521908,
    "k": 3.4498736,
}

# Degree-20 record, seven decimals as printed.  The table shorthand reads
# [2,2,1] for z, but the printed values solve the written-out structure
# z = s^14 (s^2+C1)^2 (s^2+C2) (s^2+C3), i.e. l = [2,1,1].
DEG20_TABLE_CONFIG = "[4,2,2,1],[3,2],[2,2,1]"
DEG20_CONFIG = "[4,2,2,1],[3,2],[2,1,1]"
DEG20_SOLUTION = {
    "delta": 0.9808348,
    "A1": 1.1856917,
    "A2": 6.6228807,
    "A3": 0.3090555,
    "A4": 0.2292503,
    "B1": 0.5430391,
    "B2": 0.2458118,
    "C1": 4.4038385,
    "C2": 0.7163490,
    "C3": 7.4637156,
    "k": 196.1845537,
}

# Branch-and-reduce controller of degree 10 reported admissible at this delta.
CS_DELTA = 0.9739744
CS_X = Polynomial([
    1.03326203778346, 2.03055901420484, 5.75248874640322, 9.19112429409894,
    11.89912895529042, 13.95449016040116, 11.67256448604672, 8.78344232801755,
    5.49402092964662, 1.97351109136261, 1.0,
])
CS_Y = Polynomial([
    1.03326203778319, 0.0178174691792, 3.86358782861648, 0.03394722108511,
    3.611364710425, 0.00066128189295,
])

# Worked perturbation example.
EXAMPLE_EPSILON = 0.01
EXAMPLE_DELTA_HAT = 0.950097
EXAMPLE_CRITICAL_IM = 0.311954

__all__ = [
    "FIGURE1", "CUBIC_DELTA", "QUARTIC_DELTA", "GOLDEN", "cubic_solution", "QUARTIC_SOLUTION",
    "DEG10_CONFIG", "DEG10_SOLUTION", "DEG20_TABLE_CONFIG", "DEG20_CONFIG", "DEG20_SOLUTION",
    "CS_DELTA", "CS_X", "CS_Y", "EXAMPLE_EPSILON", "EXAMPLE_DELTA_HAT", "EXAMPLE_CRITICAL_IM",
    "generic_cubic_template",
]
