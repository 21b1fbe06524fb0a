"""Randomized verification of the jet formulas against the germ oracle.

Each trial draws seeded random group-valued germs, trivializes them, and
compares the closed groupoid formulas with the trivialization of the
pointwise product or inverse.  Results are collected in a
:class:`VerifyReport` keyed by property name.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .connection import flat_connection, random_connection
from .germ import germ_inverse, germ_multiply, random_group_germ, trivialize_covariant, trivialize_flat
from .jets import (
    TrivializedJet,
    identity_jet,
    image_residual_k2,
    inverse,
    inverse_via_counts,
    multiply,
    multiply_via_counts,
)
from .lie import MatrixGroup

DEFAULT_TOL = 1e-8
MEMBERSHIP_TOL = 1e-9
IMAGE_TOL = 1e-9
MAX_N = 4
MAX_K = 5


def default_tol() -> float:
    """Oracle tolerance, overridable through ``JETGROUPOID_TOL``."""
    raw = os.environ.get("JETGROUPOID_TOL")
    return float(raw) if raw else DEFAULT_TOL


@dataclass
class PropertyStats:
    tol: float
    trials: int = 0
    passed: int = 0
    max_residual: float = 0.0

    def record(self, residual: float) -> None:
        self.trials += 1
        if residual <= self.tol:
            self.passed += 1
        self.max_residual = max(self.max_residual, float(residual))

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def to_json(self) -> dict[str, Any]:
        return {
            "tol": self.tol,
            "trials": self.trials,
            "passed": self.passed,
            "max_residual": self.max_residual,
        }


@dataclass
class VerifyReport:
    config: dict[str, Any]
    properties: dict[str, PropertyStats] = field(default_factory=dict)

    def stat(self, name: str, tol: float) -> PropertyStats:
        if name not in self.properties:
            self.properties[name] = PropertyStats(tol)
        return self.properties[name]

    def record(self, name: str, residual: float, tol: float) -> None:
        self.stat(name, tol).record(residual)

    @property
    def all_passed(self) -> bool:
        return all(p.ok for p in self.properties.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "properties": {k: v.to_json() for k, v in self.properties.items()},
            "all_passed": self.all_passed,
        }


def algebra_residual(jet: TrivializedJet) -> float:
    return max(jet.group.algebra_residual(t) for t in jet.xi)


def check_config(group: MatrixGroup, n: int, k: int, trials: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in 1..{MAX_K}")
    if trials < 1:
        raise ValueError("trials must be at least 1")


def run_verification(
    group: MatrixGroup,
    n: int,
    k: int,
    trials: int,
    seed: int,
    tol: float | None = None,
    covariant: bool = True,
) -> VerifyReport:
    """Run every randomized property ``trials`` times."""
    check_config(group, n, k, trials)
    tol = default_tol() if tol is None else tol
    report = VerifyReport(
        {
            "group_tag": group.tag,
            "n": n,
            "k": k,
            "trials": trials,
            "seed": seed,
            "tolerances": {"oracle": tol, "membership": MEMBERSHIP_TOL, "image": IMAGE_TOL},
        }
    )
    rng = np.random.default_rng(seed)
    ident = identity_jet(n, k, group)
    for _ in range(trials):
        p, q, r = (random_group_germ(rng, group, n, k) for _ in range(3))
        a, b, c = (trivialize_flat(x, k, group) for x in (p, q, r))
        pq = germ_multiply(p, q)

        report.record("oracle_multiply", trivialize_flat(pq, k, group).residual(multiply(a, b)), tol)
        report.record("oracle_inverse", trivialize_flat(germ_inverse(p), k, group).residual(inverse(a)), tol)
        report.record("associativity", multiply(multiply(a, b), c).residual(multiply(a, multiply(b, c))), tol)
        report.record(
            "identity",
            max(multiply(ident, a).residual(a), multiply(a, ident).residual(a)),
            tol,
        )
        inv_a = inverse(a)
        report.record(
            "inverse_axiom",
            max(multiply(a, inv_a).residual(ident), multiply(inv_a, a).residual(ident)),
            tol,
        )
        report.record("algebra_containment", max(algebra_residual(x) for x in (a, b, c)), MEMBERSHIP_TOL)
        if k >= 2:
            sub = [TrivializedJet(group, x.g, x.xi[:2]) for x in (a, b, c)]
            report.record("image_k2", max(image_residual_k2(x) for x in sub), IMAGE_TOL)
        if n == 1:
            report.record(
                "counts_1d",
                max(multiply_via_counts(a, b).residual(multiply(a, b)), inverse_via_counts(a).residual(inverse(a))),
                tol,
            )
        if covariant:
            report.record(
                "flat_equals_covariant_gamma0",
                trivialize_covariant(p, k, flat_connection(n, max(k - 1, 0)), group).residual(a),
                1e-12,
            )
            gamma = random_connection(rng, n, max(k - 1, 0))
            ac, bc = (trivialize_covariant(x, k, gamma, group) for x in (p, q))
            report.record(
                "covariant_oracle_multiply",
                trivialize_covariant(pq, k, gamma, group).residual(multiply(ac, bc)),
                10 * tol,
            )
            report.record(
                "covariant_oracle_inverse",
                trivialize_covariant(germ_inverse(p), k, gamma, group).residual(inverse(ac)),
                10 * tol,
            )
    return report


def verify_jet(jet: TrivializedJet, tol: float | None = None) -> VerifyReport:
    """Properties a single stored jet must satisfy."""
    tol = default_tol() if tol is None else tol
    report = VerifyReport({"group_tag": jet.group.tag, "n": jet.n, "k": jet.k, "N": jet.N, "tol": tol})
    report.record("group_membership", jet.group.group_residual(jet.g), jet.group.tol)
    report.record("algebra_containment", algebra_residual(jet), jet.group.tol)
    ident = identity_jet(jet.n, jet.k, jet.group)
    inv = inverse(jet)
    report.record("inverse_axiom", max(multiply(jet, inv).residual(ident), multiply(inv, jet).residual(ident)), tol)
    if jet.k == 2:
        report.record("image_k2", image_residual_k2(jet), IMAGE_TOL)
    return report


def verify_pair(a: TrivializedJet, b: TrivializedJet, tol: float | None = None) -> VerifyReport:
    """Check that ``b`` is the groupoid inverse of ``a``."""
    tol = default_tol() if tol is None else tol
    report = VerifyReport({"group_tag": a.group.tag, "n": a.n, "k": a.k, "N": a.N, "tol": tol})
    ident = identity_jet(a.n, a.k, a.group)
    report.record("inverse_axiom", max(multiply(a, b).residual(ident), multiply(b, a).residual(ident)), tol)
    return report
