"""
Simulation scenarios: true response rates for six cancer types.

Effective types are those where the drug works (marked True). In the graded
scenario the rates 0.30, 0.40 and 0.50 count as effective.
"""

from typing import Dict, List, Tuple

# name -> (rates, effective flags)
SCENARIOS: Dict[str, Tuple[List[float], List[bool]]] = {
    "scenario1": ([0.10, 0.10, 0.10, 0.10, 0.10, 0.10], [False, False, False, False, False, False]),
    "scenario2": ([0.10, 0.10, 0.10, 0.10, 0.10, 0.40], [False, False, False, False, False, True]),
    "scenario3": ([0.10, 0.10, 0.10, 0.10, 0.40, 0.40], [False, False, False, False, True, True]),
    "scenario4": ([0.10, 0.10, 0.10, 0.40, 0.40, 0.40], [False, False, False, True, True, True]),
    "scenario5": ([0.10, 0.10, 0.40, 0.40, 0.40, 0.40], [False, False, True, True, True, True]),
    "scenario6": ([0.10, 0.40, 0.40, 0.40, 0.40, 0.40], [False, True, True, True, True, True]),
    "scenario7": ([0.40, 0.40, 0.40, 0.40, 0.40, 0.40], [True, True, True, True, True, True]),
    "scenario8": ([0.05, 0.10, 0.20, 0.30, 0.40, 0.50], [False, False, False, True, True, True]),
}


def get_scenario_names() -> List[str]:
    return list(SCENARIOS)


def is_builtin_scenario(name: str) -> bool:
    return name in SCENARIOS
