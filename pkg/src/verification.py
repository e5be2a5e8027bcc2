import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import pandas as pd

from .core_algebra import GenusKind
from .genera import (
    DEFAULT_MAX_N,
    verify_binomial_transform,
    verify_h_decomposition,
    verify_libgober_wood,
    verify_theorem_mr,
)
from .symmetric import IdentityCheck, verify_lemma23


def _lemma23(n: int, max_n: int) -> List[IdentityCheck]:
    return verify_lemma23(n)


def _binomial_transform(n: int, max_n: int) -> List[IdentityCheck]:
    checks = []
    for kind in GenusKind:
        checks.extend(verify_binomial_transform(kind, n, max_n))
    return checks


VERIFIERS: Dict[str, Callable[[int, int], List[IdentityCheck]]] = {
    "lemma23": _lemma23,
    "theorem-mr": verify_theorem_mr,
    "libgober-wood": verify_libgober_wood,
    "h-decomposition": verify_h_decomposition,
    "binomial-transform": _binomial_transform,
}

MIN_N = {
    "lemma23": 2,
    "theorem-mr": 2,
    "libgober-wood": 2,
    "h-decomposition": 2,
    "binomial-transform": 1,
}

TARGETS = tuple(VERIFIERS) + ("all",)


def run_target(job: Tuple[str, int, int]) -> List[IdentityCheck]:
    """Run one verifier at one n; module-level so worker processes can import it"""
    target, n, max_n = job
    return VERIFIERS[target](n, max_n)


@dataclass(frozen=True)
class TargetResult:
    target: str
    n: int
    checks: Tuple[IdentityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        good = sum(check.passed for check in self.checks)
        return f"{status} {self.target} n={self.n} ({good}/{len(self.checks)} identities)"


class IdentityVerifier:
    """Runs the identity verifiers over a range of dimensions"""

    def __init__(self, n_min: int, n_max: int, workers: int = 1, max_n: int = DEFAULT_MAX_N):
        if n_max < n_min:
            raise ValueError(f"Empty range {n_min}..{n_max}")
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self.n_min = n_min
        self.n_max = n_max
        self.workers = workers
        self.max_n = max_n
        self.results: List[TargetResult] = []
        self.logger = logging.getLogger(__name__)

    def _targets(self, target: str) -> List[str]:
        if target == "all":
            return list(VERIFIERS)
        if target not in VERIFIERS:
            raise ValueError(f"Unknown target {target!r}; expected one of {TARGETS}")
        return [target]

    def run(self, target: str) -> List[TargetResult]:
        """Verify every requested identity for each n, ascending in n"""
        targets = self._targets(target)
        for name in targets:
            if self.n_min < MIN_N[name]:
                raise ValueError(f"{name} needs n >= {MIN_N[name]}, got n_min={self.n_min}")

        jobs = [(name, n, self.max_n) for n in range(self.n_min, self.n_max + 1) for name in targets]
        self.logger.info(f"Running {len(jobs)} verification jobs with {self.workers} worker(s)")
        if self.workers == 1:
            outcomes = [run_target(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                outcomes = list(pool.map(run_target, jobs))

        self.results = [
            TargetResult(name, n, tuple(checks)) for (name, n, _), checks in zip(jobs, outcomes)
        ]
        failed = [r for r in self.results if not r.passed]
        if failed:
            self.logger.warning(f"{len(failed)} of {len(self.results)} verification jobs failed")
        return self.results

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def checks(self) -> List[IdentityCheck]:
        return [check for result in self.results for check in result.checks]

    def summary_frame(self) -> pd.DataFrame:
        """One row per (n, target) with pass and fail counts"""
        rows = [
            {
                "n": r.n,
                "target": r.target,
                "passed": sum(c.passed for c in r.checks),
                "failed": sum(not c.passed for c in r.checks),
            }
            for r in self.results
        ]
        return pd.DataFrame(rows, columns=["n", "target", "passed", "failed"])
