"""Experiment drivers: the norm-ratio blow-up at the critical exponent,
the boundedness scan inside the regular range, the exact-identity suite,
and the annihilation check for the symmetric kernel part.

Every driver returns an :class:`ExperimentReport` whose JSON form is
schema-versioned and reproducible (same inputs and seed give the same
bytes, up to the wall-time field).  All quadrature-based numbers carry a
convergence delta measured by re-running on a refined rule; a delta above
5% aborts the run with :class:`QuadratureNotConverged`.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations, permutations

import numpy as np

from . import symbolic
from .errors import QuadratureNotConverged
from .kernels import KernelSpec, apply_operator, test_function_hs, tilde_shape
from .symmetrization import Permutation
from .quadrature import (
    WeightSpec,
    disc_rule,
    refine,
    singular_disc_rule,
    weighted_lp_norm,
)

SCHEMA_VERSION = "1"

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "schema_version",
        "experiment",
        "n",
        "p",
        "s_grid",
        "rows",
        "fit",
        "quadrature",
        "seed",
        "wall_time_s",
        "passed",
        "notes",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "experiment": {
            "enum": ["blowup", "scan", "identities", "annihilation"]
        },
        "n": {"type": ["integer", "null"]},
        "p": {"type": ["number", "null"]},
        "s_grid": {
            "type": ["array", "null"],
            "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        },
        "rows": {"type": "array", "items": {"type": "object"}},
        "fit": {"type": ["object", "null"]},
        "quadrature": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
        "wall_time_s": {"type": "number"},
        "passed": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

DEFAULT_S_GRID = (0.9, 0.99, 0.999, 0.9999)
# the scan compares the ratio spread against an absolute bound, so its
# default grid stops where transient growth of large-but-bounded
# operators (p just inside an endpoint) would blur the verdict; the
# blow-up fit instead benefits from the deepest reachable grid
DEFAULT_SCAN_S_GRID = (0.9, 0.99, 0.999)
# (radial order, angular order) for the per-s singular rules; the triple
# tensor product at n = 3 is the cost driver, so it runs leaner
DEFAULT_NORM_ORDERS = {2: (8, 16), 3: (5, 10)}
REFINE_FACTORS = {2: (1.5, 1.5), 3: (1.4, 1.4)}
CALIBRATION_S = 0.7
CALIBRATION_POINTS = {
    2: ((0.3 + 0.0j, -0.2 + 0.0j), (0.1 + 0.2j, -0.4 + 0.0j)),
    3: ((0.3 + 0.0j, -0.2 + 0.0j, 0.1 + 0.0j), (0.1 + 0.2j, -0.4 + 0.0j, 0.25 + 0.0j)),
}
MAX_NORM_DELTA = 0.05
MAX_CALIBRATION_RESIDUAL = 0.02
FLAT_RATIO_BOUND = 4.0

JACOBIAN_SQUARED = WeightSpec.jacobian_power(2.0)


@dataclass
class ExperimentReport:
    """Schema-versioned result of one experiment run."""

    experiment: str
    n: int | None
    p: float | None
    s_grid: list | None
    rows: list
    fit: dict | None
    quadrature: dict
    seed: int | None
    wall_time_s: float
    passed: bool
    notes: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def write(self, path) -> None:
        with open(path, "w") as handle:
            handle.write(self.to_json() + "\n")


def write_ratio_csv(report: ExperimentReport, path) -> None:
    """Plain-text plot data: one line per (p, s) cell of a ratio run."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["s", "h_norm_power", "image_norm_power", "ratio", "neg_log_one_minus_s"]
        )
        for row in report.rows:
            cells = row["cells"] if "cells" in row else [row]
            for cell in cells:
                writer.writerow(
                    [
                        cell["s"],
                        cell["h_norm_power"],
                        cell["image_norm_power"],
                        cell["ratio"],
                        cell["neg_log_one_minus_s"],
                    ]
                )


def _fit_line(x, y):
    """Least-squares fit y = alpha + beta x with stderr(beta) and R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ coef
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    dof = len(x) - 2
    if dof > 0:
        sigma_sq = ss_res / dof
        covariance = sigma_sq * np.linalg.inv(design.T @ design)
        beta_stderr = float(math.sqrt(covariance[1, 1]))
    else:
        beta_stderr = None
    return {
        "alpha": float(coef[0]),
        "beta": float(coef[1]),
        "beta_stderr": beta_stderr,
        "r_squared": r_squared,
        "residuals": [float(r) for r in residuals],
    }


def _log_log_slope(s_grid, values):
    """Exponent of values ~ (1-s)^e, by a log-log fit."""
    x = np.log1p(-np.asarray(s_grid, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def _norm_power_with_delta(f, p, n, s, orders, factors):
    """p-th power of the weighted norm, with its refinement delta."""
    base = singular_disc_rule(s, *orders)
    fine = refine(base, *factors)
    coarse = weighted_lp_norm(f, p, JACOBIAN_SQUARED, base, n, symmetric=True) ** p
    value = weighted_lp_norm(f, p, JACOBIAN_SQUARED, fine, n, symmetric=True) ** p
    delta = abs(value - coarse) / abs(value)
    if delta > MAX_NORM_DELTA:
        raise QuadratureNotConverged(
            f"norm at s={s} moved by {delta:.1%} under rule refinement"
        )
    return value, delta


def _calibrate_image_constant(n, orders):
    """Fit the constant relating the operator image of the test family to
    its closed shape, by honest quadrature at a moderate parameter.

    The image of the blow-up family under the symmetric-side operator is
    an exact constant multiple of :func:`tilde_shape`; the constant is
    measured (never assumed) here, and its consistency across evaluation
    points is the convergence check for the rest of the run.
    """
    rule = singular_disc_rule(CALIBRATION_S, orders[0] + 1, orders[1] + 2)
    spec = KernelSpec(family="tilde", n=n)

    def family(pts):
        return test_function_hs(n, CALIBRATION_S, pts)

    ratios = []
    for z in CALIBRATION_POINTS[n]:
        z = np.asarray(z)
        image = apply_operator(spec, family, z, rule, n, symmetric_f=True)
        ratios.append(image / complex(tilde_shape(n, CALIBRATION_S, z)))
    constant = sum(ratios) / len(ratios)
    residual = max(abs(r - constant) for r in ratios) / abs(constant)
    if residual > MAX_CALIBRATION_RESIDUAL:
        raise QuadratureNotConverged(
            f"image-constant calibration residual {residual:.1e} "
            f"exceeds {MAX_CALIBRATION_RESIDUAL}"
        )
    return constant, residual


def _ratio_cells(n, p, s_grid, orders, factors, constant):
    cells = []
    for s in s_grid:

        def family(pts, s=s):
            return test_function_hs(n, s, pts)

        def image(pts, s=s):
            return constant * tilde_shape(n, s, pts)

        h_power, h_delta = _norm_power_with_delta(family, p, n, s, orders, factors)
        image_power, image_delta = _norm_power_with_delta(
            image, p, n, s, orders, factors
        )
        cells.append(
            {
                "s": float(s),
                "h_norm_power": h_power,
                "h_delta": h_delta,
                "image_norm_power": image_power,
                "image_delta": image_delta,
                "ratio": image_power / h_power,
                "neg_log_one_minus_s": -math.log1p(-s),
            }
        )
    return cells


def _check_ratio_inputs(n, s_grid):
    if n not in (2, 3):
        raise ValueError("ratio experiments run at n = 2 or n = 3")
    s_grid = tuple(float(s) for s in s_grid)
    if not s_grid or any(not 0.0 < s < 1.0 for s in s_grid):
        raise ValueError("the s grid must lie strictly inside (0, 1)")
    if list(s_grid) != sorted(set(s_grid)):
        raise ValueError("the s grid must be strictly increasing")
    return s_grid


def _quadrature_descriptor(orders, factors, calibration_residual):
    return {
        "family": "polar-graded-at-1/s",
        "radial_order": orders[0],
        "angular_order": orders[1],
        "refinement_factors": list(factors),
        "calibration_s": CALIBRATION_S,
        "calibration_residual": calibration_residual,
    }


def blowup_experiment(n, p, s_grid=None, rule=None, seed=0) -> ExperimentReport:
    """Ratio r(s) of the weighted p-norm powers of the operator image of
    the blow-up family against the family itself, with the linear fit of
    r(s) on -log(1-s).

    ``rule`` is a (radial_order, angular_order) pair for the singular
    per-s rules; defaults are dimension-tuned.
    """
    start = time.time()
    s_grid = _check_ratio_inputs(n, s_grid or DEFAULT_S_GRID)
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    orders = tuple(rule) if rule is not None else DEFAULT_NORM_ORDERS[n]
    factors = REFINE_FACTORS[n]

    constant, residual = _calibrate_image_constant(n, orders)
    cells = _ratio_cells(n, p, s_grid, orders, factors, constant)

    ratios = [c["ratio"] for c in cells]
    fit = _fit_line([c["neg_log_one_minus_s"] for c in cells], ratios)
    fit["strictly_increasing"] = all(a < b for a, b in zip(ratios, ratios[1:]))
    fit["h_norm_exponent"] = _log_log_slope(s_grid, [c["h_norm_power"] for c in cells])
    fit["image_norm_exponent"] = _log_log_slope(
        s_grid, [c["image_norm_power"] for c in cells]
    )
    fit["image_constant"] = {"re": constant.real, "im": constant.imag}

    critical = 2.0 * n / (n - 1.0)
    notes = [
        "fit is over the computed grid only; no extrapolation past max(s)",
    ]
    if math.isclose(p, critical):
        notes.append("p equals the critical exponent 2n/(n-1)")
    return ExperimentReport(
        experiment="blowup",
        n=n,
        p=float(p),
        s_grid=list(s_grid),
        rows=cells,
        fit=fit,
        quadrature=_quadrature_descriptor(orders, factors, residual),
        seed=seed,
        wall_time_s=time.time() - start,
        passed=bool(fit["strictly_increasing"] and fit["beta"] > 0.0),
        notes=notes,
    )


def boundedness_scan(n, p_list, s_grid=None, rule=None, seed=0) -> ExperimentReport:
    """Flat-or-growing verdict of the norm ratio r(s) for each p.

    A finite grid cannot prove boundedness; the verdicts are consistency
    checks.  Expected verdicts come from the open interval
    (2n/(n+1), 2n/(n-1)): strictly inside means flat, at or beyond an
    endpoint means growing.
    """
    start = time.time()
    s_grid = _check_ratio_inputs(n, s_grid or DEFAULT_SCAN_S_GRID)
    p_list = [float(p) for p in p_list]
    if not p_list or any(p <= 1.0 for p in p_list):
        raise ValueError("every scanned p must exceed 1")
    orders = tuple(rule) if rule is not None else DEFAULT_NORM_ORDERS[n]
    factors = REFINE_FACTORS[n]

    constant, residual = _calibrate_image_constant(n, orders)
    lower = 2.0 * n / (n + 1.0)
    upper = 2.0 * n / (n - 1.0)

    rows = []
    all_consistent = True
    for p in p_list:
        cells = _ratio_cells(n, p, s_grid, orders, factors, constant)
        ratios = [c["ratio"] for c in cells]
        spread = max(ratios) / min(ratios)
        verdict = "flat" if spread < FLAT_RATIO_BOUND else "growing"
        inside = lower < p < upper and not (
            math.isclose(p, lower) or math.isclose(p, upper)
        )
        # the ratio diagnostic witnesses the failure at and beyond the
        # upper endpoint; below the lower endpoint the failure lives on
        # the dual side, where this symmetric family stays flat
        expected = (
            "growing" if p > upper or math.isclose(p, upper) else "flat"
        )
        consistent = verdict == expected
        all_consistent = all_consistent and consistent
        rows.append(
            {
                "p": p,
                "cells": cells,
                "ratio_max_over_min": spread,
                "verdict": verdict,
                "expected": expected,
                "consistent": consistent,
                "theory_bounded": inside,
                "at_or_beyond_endpoint": not inside,
            }
        )

    return ExperimentReport(
        experiment="scan",
        n=n,
        p=None,
        s_grid=list(s_grid),
        rows=rows,
        fit=None,
        quadrature=_quadrature_descriptor(orders, factors, residual),
        seed=seed,
        wall_time_s=time.time() - start,
        passed=all_consistent,
        notes=[
            "verdicts are consistent-with statements over a finite grid,"
            " not boundedness proofs",
            f"flat means max/min of r(s) below {FLAT_RATIO_BOUND}",
            "a flat ratio at or below the lower endpoint is expected:"
            " that failure is dual-sided and invisible to this family"
            " (see theory_bounded per row)",
        ],
    )


_VERIFIER_TABLE = (
    ("ab_identity", symbolic.verify_ab_identity, 2, 4),
    ("kernel_decomposition", symbolic.verify_kernel_decomposition, 2, 4),
    ("pI_expansion", symbolic.verify_pI_expansion, 1, 3),
    ("vandermonde_expansion", symbolic.verify_vandermonde_expansion, 2, 5),
    ("partial_fraction", symbolic.verify_partial_fraction, 3, 5),
)


def identity_suite(max_n, negative_controls=False, seed=0) -> ExperimentReport:
    """Run every exact-identity verifier up to its index cap (bounded by
    ``max_n``), optionally with mutated negative controls that must fail.
    """
    start = time.time()
    if not 2 <= max_n <= 5:
        raise ValueError("the identity suite runs for max_n between 2 and 5")

    rows = []
    all_passed = True
    for name, verifier, low, cap in _VERIFIER_TABLE:
        for index in range(low, min(cap, max_n) + 1):
            variants = [(False, True)]
            if negative_controls:
                variants.append((True, False))
            for mutate, expected in variants:
                details = {}
                outcome = bool(verifier(index, mutate=mutate, collect=details))
                passed = outcome == expected
                all_passed = all_passed and passed
                rows.append(
                    {
                        "verifier": name,
                        "index": index,
                        "mutated": mutate,
                        "outcome": outcome,
                        "expected": expected,
                        "passed": passed,
                        "details": details,
                    }
                )

    return ExperimentReport(
        experiment="identities",
        n=max_n,
        p=None,
        s_grid=None,
        rows=rows,
        fit=None,
        quadrature={"family": "exact-rational"},
        seed=seed,
        wall_time_s=time.time() - start,
        passed=all_passed,
        notes=["all checks run in exact Gaussian-rational arithmetic"],
    )


# annihilation is a pointwise cancellation, so modest orders suffice; the
# full-tensor triple product at n = 3 makes large rules expensive
DEFAULT_ANNIHILATION_RULE_ORDERS = {2: (8, 16), 3: (4, 8)}
ANNIHILATION_FLOOR = 1e-12
CONTROL_THRESHOLD = 1e-3


def _vandermonde_function(pts):
    pts = np.asarray(pts)
    out = np.ones(pts.shape[0], dtype=complex)
    for j, k in combinations(range(pts.shape[1]), 2):
        out *= pts[:, j] - pts[:, k]
    return out


def _alternating_monomial(exponents):
    """Antisymmetrization of a coordinate monomial over all permutations."""

    def evaluate(pts):
        pts = np.asarray(pts)
        out = np.zeros(pts.shape[0], dtype=complex)
        for perm in permutations(range(pts.shape[1])):
            sign = Permutation(perm).sign
            term = np.ones(pts.shape[0], dtype=complex)
            for slot, exponent in zip(perm, exponents):
                term *= pts[:, slot] ** exponent
            out += sign * term
        return out

    return evaluate


def default_annihilation_samples(n, count=20, seed=7):
    """Deterministic interior sample points for the annihilation check."""
    rng = np.random.default_rng(seed)
    radius = rng.uniform(0.0, 0.75, (count, n))
    angle = rng.uniform(0.0, 2.0 * math.pi, (count, n))
    return radius * np.exp(1j * angle)


def annihilation_check(
    n, z_samples=None, rule=None, negative_control=True, seed=7
) -> ExperimentReport:
    """Maximum modulus of the antisymmetric-annihilating kernel part
    applied to alternating test functions, with a non-alternating control.

    A test function passes when the maximum stays below ten times the
    rule-refinement delta (plus a roundoff floor); the control passes when
    its maximum is macroscopic.
    """
    start = time.time()
    if n not in (2, 3):
        raise ValueError("the annihilation check runs at n = 2 or n = 3")
    if z_samples is None:
        z_samples = default_annihilation_samples(n, seed=seed)
    z_samples = np.asarray(z_samples)
    if rule is None:
        rule = disc_rule(*DEFAULT_ANNIHILATION_RULE_ORDERS[n])
    fine = refine(rule, 1.5, 1.5)
    spec = KernelSpec(family="t1", n=n)

    monomial = {2: (2, 0), 3: (3, 1, 0)}[n]
    functions = [
        ("vandermonde", _vandermonde_function, "zero"),
        ("alternating_monomial", _alternating_monomial(monomial), "zero"),
    ]
    if negative_control:
        functions.append(
            ("first_coordinate_control", lambda pts: np.asarray(pts)[:, 0], "nonzero")
        )

    rows = []
    all_passed = True
    for name, function, expected in functions:
        base_values = []
        fine_values = []
        for z in z_samples:
            base_values.append(apply_operator(spec, function, z, rule, n))
            fine_values.append(apply_operator(spec, function, z, fine, n))
        base_values = np.asarray(base_values)
        fine_values = np.asarray(fine_values)
        max_abs = float(np.max(np.abs(fine_values)))
        delta = float(np.max(np.abs(fine_values - base_values)))
        if expected == "zero":
            threshold = 10.0 * delta + ANNIHILATION_FLOOR
            passed = max_abs < threshold
        else:
            threshold = CONTROL_THRESHOLD
            passed = max_abs > threshold
        all_passed = all_passed and passed
        rows.append(
            {
                "function": name,
                "expected": expected,
                "max_abs": max_abs,
                "delta": delta,
                "threshold": threshold,
                "passed": passed,
            }
        )

    return ExperimentReport(
        experiment="annihilation",
        n=n,
        p=None,
        s_grid=None,
        rows=rows,
        fit=None,
        quadrature={
            "base": dict(rule.descriptor),
            "refinement_factors": [1.5, 1.5],
            "sample_count": int(len(z_samples)),
        },
        seed=seed,
        wall_time_s=time.time() - start,
        passed=all_passed,
        notes=["alternating inputs must be annihilated; the control must not be"],
    )
