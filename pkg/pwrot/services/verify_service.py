"""
Verify service - replays the bundled worked examples as named checks.

Suites: irrational-example, rational-example, all.
"""
import math
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from pwrot.bounds import irrational_bound, rational_bound
from pwrot.core_map import PiecewiseRotation, classify, normalize, triple_norm
from pwrot.diophantine import cf_expand, l0_lhs, three_gaps
from pwrot.models.params import load_parameters
from pwrot.models.reports import VerifyCheck, VerifySuiteResult
from pwrot.rational_structure import translation_codes, zone_map
from pwrot.utils.logger import get_logger

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

IRRATIONAL_Q = [1, 2, 3, 14, 17, 82, 99, 478, 577, 2786]
IRRATIONAL_P = [0, 1, 1, 5, 6, 29, 35, 169, 204, 985]
RATIONAL_M = 120968.0


def load_example(name: str) -> PiecewiseRotation:
    """Normalized map from a bundled parameter file, e.g. "irrational_example"."""
    return normalize(load_parameters(DATA_DIR / f"{name}.json"))


def _within(name: str, value: float, lo: float, hi: float, closed_hi: bool = False) -> VerifyCheck:
    upper_ok = value <= hi if closed_hi else value < hi
    bracket = "]" if closed_hi else ")"
    return VerifyCheck(name=name, expected=f"({lo}, {hi}{bracket}", computed=value,
                       passed=bool(lo < value and upper_ok))


def _equal(name: str, expected, computed) -> VerifyCheck:
    return VerifyCheck(name=name, expected=expected, computed=computed, passed=expected == computed)


def _close(name: str, expected: float, computed: float, tolerance: float, relative: bool = False) -> VerifyCheck:
    scale = abs(expected) if relative else 1.0
    return VerifyCheck(name=name, expected=expected, computed=computed, tolerance=tolerance,
                       passed=bool(abs(computed - expected) <= tolerance * scale))


class VerifyService:
    """
    Runs verify suites against the bundled example maps.
    """

    def __init__(self, probes: int = 2000, seed: int = 0):
        """
        Args:
            probes: Random far-field probes for the translation check
            seed: RNG seed for the probes
        """
        self.probes = probes
        self.seed = seed
        self.logger = get_logger(__name__)
        self._suites: Dict[str, Callable[[], List[VerifyCheck]]] = {
            "irrational-example": self.irrational_checks,
            "rational-example": self.rational_checks,
        }

    @property
    def suite_names(self) -> List[str]:
        return list(self._suites) + ["all"]

    def run(self, suite: str) -> VerifySuiteResult:
        if suite == "all":
            checks = [check for name in self._suites for check in self._suites[name]()]
        elif suite in self._suites:
            checks = self._suites[suite]()
        else:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(self.suite_names)}")
        result = VerifySuiteResult(suite=suite, checks=checks)
        failed = [check.name for check in checks if not check.passed]
        if failed:
            self.logger.warning("Suite %s: %s failed checks: %s", suite, len(failed), ", ".join(failed))
        else:
            self.logger.info("Suite %s: all %s checks passed", suite, len(checks))
        return result

    def irrational_checks(self) -> List[VerifyCheck]:
        T = load_example("irrational_example")
        cls = classify(T)
        norm = triple_norm(T)
        conv = cf_expand(T.spec, len(IRRATIONAL_Q))
        report = irrational_bound(T, conv, shift=True)
        abs_delta = abs(cls.delta)

        checks = [
            _within("delta", cls.delta, -0.14, -0.13),
            _within("norm", norm, 2.68, 2.69, closed_hi=True),
            _equal("convergent_q", IRRATIONAL_Q, list(conv.q)),
            _equal("convergent_p", IRRATIONAL_P, list(conv.p)),
            _equal("l0", 8, report.l0),
            _within("lhs_q8", l0_lhs(norm, abs_delta, conv.q[8]), 0.0, 0.0383),
            _within("lhs_q7", l0_lhs(norm, abs_delta, conv.q[7]), 0.0460 * (1 - 1e-3), math.inf),
            _within("M", report.M, 571100.0, 571283.0, closed_hi=True),
        ]
        for l in range(1, 9):
            gaps = three_gaps(conv, l, strict=False)
            checks.append(VerifyCheck(
                name=f"three_gaps_l{l}",
                expected="<= 3 distinct, min gap >= 1/(2 q_l)",
                computed=len(gaps.distinct),
                passed=gaps.three_distance_holds and gaps.min_gap >= gaps.lower_bound,
            ))

        shift = report.origin_shift
        p_point = complex(*shift.p_point)
        checks += [
            _close("shift_point", 0.0, abs(p_point - 0.275j), 1e-3),
            _close("norm_shifted", 2.249, shift.norm_shifted, 0.005),
            VerifyCheck(name="M_shifted_improves", expected=f"< {report.M}",
                        computed=shift.M_shifted, passed=shift.M_shifted < report.M),
        ]
        return checks

    def rational_checks(self) -> List[VerifyCheck]:
        T = load_example("rational_example")
        cls = classify(T)
        report = rational_bound(T)
        zm = zone_map(T)

        rng = np.random.default_rng(self.seed)
        radius = 2.0 * zm.big_q / math.sin(math.pi / zm.q)
        probes = radius * (1.0 + rng.uniform(0.0, 1.0, self.probes)) * np.exp(
            2j * math.pi * rng.uniform(0.0, 1.0, self.probes)
        )
        unmatched = int(np.count_nonzero(translation_codes(zm, probes) < 0))

        return [
            _within("delta", cls.delta, -0.13112, -0.13111),
            _close("M", RATIONAL_M, report.M, 5e-4, relative=True),
            _close("w_over_v", math.cos(math.pi / zm.q), zm.w / zm.v, 1e-12),
            _equal("unmatched_translations", 0, unmatched),
        ]
