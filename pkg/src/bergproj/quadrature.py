"""Quadrature rules on the unit disc and tensor integration on the polydisc.

Two rule families:

* ``disc_rule`` -- Gauss-Legendre in the squared radius times a uniform
  midpoint angular grid, optionally graded toward the boundary circle and
  locally refined in an angular sector.  Weights sum to pi exactly (up to
  roundoff) because both one-dimensional pieces integrate constants
  exactly.
* ``polar_rule_at`` -- polar coordinates about an arbitrary center (inside
  or outside the closed disc), with log-graded radial panels and per-ring
  angular rules on the arcs that meet the disc.  This is the rule of
  choice when the integrand blows up at one point: rings are level sets
  of the distance to the singularity.

Polydisc integrals are tensor products of a single disc rule, evaluated
in chunks; for symmetric integrands in three variables the sum is reduced
to sorted index triples with multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OverflowInIntegrand

TWO_PI = 2.0 * math.pi

#: relative inner cutoff for polar rules centered inside the disc; the
#: omitted disc around the center has radius cutoff * (outer radius), so
#: for any integrable power singularity the lost mass is a few percent at
#: worst and far below quadrature error for exponents above -1.9
INNER_CUTOFF = 1e-13


@dataclass
class QuadratureRule:
    """Nodes, positive weights and a descriptor sufficient to rebuild.

    ``aux`` carries rule-family extras; polar rules store the exact
    distance of each node to the rule center there, because for strongly
    graded rules that distance underflows when recomputed from the node
    coordinates themselves.
    """

    nodes: np.ndarray
    weights: np.ndarray
    descriptor: dict
    aux: dict | None = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _gauss_legendre(order, lo, hi):
    x, w = np.polynomial.legendre.leggauss(int(order))
    mid, half = (hi + lo) / 2.0, (hi - lo) / 2.0
    return mid + half * x, half * w


def disc_rule(radial_order, angular_order, cluster=None, boost=None) -> QuadratureRule:
    """Product rule on the unit disc with weights summing to pi.

    ``cluster`` (integer >= 1) grades radial nodes toward the boundary by
    substituting u -> 1 - (1 - u)^cluster in the squared radius, which
    integrates (1 - |w|^2)^(1/cluster - 1) type boundary growth exactly.
    ``boost = (factor, halfwidth)`` refines the angular grid inside the
    sector |arg w| < halfwidth by roughly ``factor`` while keeping the
    total angular weight exactly 2 pi.
    """
    u, uw = _gauss_legendre(radial_order, 0.0, 1.0)
    if cluster is not None:
        gamma = int(cluster)
        if gamma < 1:
            raise ValueError("cluster exponent must be a positive integer")
        uw = uw * gamma * (1.0 - u) ** (gamma - 1)
        u = 1.0 - (1.0 - u) ** gamma
    r = np.sqrt(u)

    if boost is None:
        m = int(angular_order)
        theta = -math.pi + TWO_PI * (np.arange(m) + 0.5) / m
        tw = np.full(m, TWO_PI / m)
    else:
        factor, halfwidth = boost
        m_out = int(angular_order)
        m_in = max(1, math.ceil(factor * m_out * halfwidth / math.pi))
        inside = -halfwidth + 2.0 * halfwidth * (np.arange(m_in) + 0.5) / m_in
        span = TWO_PI - 2.0 * halfwidth
        outside = halfwidth + span * (np.arange(m_out) + 0.5) / m_out
        outside = np.where(outside > math.pi, outside - TWO_PI, outside)
        theta = np.concatenate([inside, outside])
        tw = np.concatenate(
            [np.full(m_in, 2.0 * halfwidth / m_in), np.full(m_out, span / m_out)]
        )

    nodes = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    weights = (0.5 * uw[:, None] * tw[None, :]).ravel()
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        descriptor={
            "family": "disc",
            "radial_order": int(radial_order),
            "angular_order": int(angular_order),
            "cluster": cluster,
            "boost": tuple(boost) if boost is not None else None,
        },
    )


def _panel_nodes(a, b, order, sqrt_left, sqrt_right):
    """GL nodes on a radial panel, absorbing square-root edge behavior.

    Where a ring of the polar rule becomes tangent to the boundary circle
    (or switches from full circles to arcs) the arc length vanishes or
    kinks like sqrt(distance to the edge); substituting rho = edge +/-
    eta^2 turns that into a smooth integrand in eta.
    """
    if sqrt_left and sqrt_right:
        mid = 0.5 * (a + b)
        x1, w1 = _panel_nodes(a, mid, order, True, False)
        x2, w2 = _panel_nodes(mid, b, order, False, True)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])
    if sqrt_left or sqrt_right:
        eta, eta_w = _gauss_legendre(order, 0.0, math.sqrt(b - a))
        if sqrt_left:
            return a + eta**2, 2.0 * eta * eta_w
        return (b - eta**2)[::-1], (2.0 * eta * eta_w)[::-1]
    return _gauss_legendre(order, a, b)


def _radial_panels(center_dist, radial_order, inner_cutoff):
    """Radial panel scheme for a polar rule about a point at distance d.

    Exterior centers: half-decade log panels from d-1 to d+1 with sqrt
    substitutions at both tangency radii.  Interior centers: log-graded
    full-circle panels from the inner cutoff out to 1-d, then a clipped
    band up to 1+d with sqrt substitutions at its kink and tangency edges.
    ``radial_order`` is the Gauss-Legendre order used on each panel, so
    scaling it refines every panel uniformly.
    """
    d = center_dist
    rho_max = d + 1.0
    panels = []
    if d > 1.0:
        lo = d - 1.0
        count = max(1, math.ceil(2.0 * math.log10(rho_max / lo)))
        edges = np.geomspace(lo, rho_max, count + 1)
        for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
            panels.append((a, b, i == 0, i == count - 1))
    else:
        lo = inner_cutoff * rho_max
        inner_hi = 1.0 - d
        if inner_hi > 1.01 * lo:
            count = max(1, math.ceil(math.log10(inner_hi / lo)))
            edges = np.geomspace(lo, inner_hi, count + 1)
            for a, b in zip(edges[:-1], edges[1:]):
                panels.append((a, b, False, False))
        else:
            inner_hi = lo
        if d > 1e-14:
            count = 3
            edges = np.geomspace(inner_hi, rho_max, count + 1)
            for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
                panels.append((a, b, i == 0, i == count - 1))
    per_panel = max(4, int(radial_order))
    rho, rho_w = [], []
    for a, b, s_left, s_right in panels:
        x, w = _panel_nodes(a, b, per_panel, s_left, s_right)
        rho.append(x)
        rho_w.append(w)
    return np.concatenate(rho), np.concatenate(rho_w)


def polar_rule_at(center, radial_order, angular_order, inner_cutoff=INNER_CUTOFF):
    """Polar product rule about ``center`` covering the unit disc.

    Rings are circles around the center clipped to the disc: a full circle
    when it lies inside, otherwise the arc facing the disc with its exact
    angular extent.  Radial nodes are log-graded, so integrands singular
    at the center (any integrable power, plus logarithms) are resolved
    down to ``inner_cutoff`` times the outer radius.  ``radial_order``
    counts nodes per log panel and ``angular_order`` nodes per arc, so
    both scale accuracy directly.
    """
    center = complex(center)
    d = abs(center)
    if abs(d - 1.0) < 1e-9:
        raise ValueError("polar rule center may not sit on the boundary circle")
    beta = math.atan2(center.imag, center.real)
    rho, rho_w = _radial_panels(d, radial_order, inner_cutoff)

    m = int(angular_order)
    gl_x, gl_w = np.polynomial.legendre.leggauss(m)
    nodes, weights, dists, log_weights = [], [], [], []
    for rr, ww in zip(rho, rho_w):
        if d < 1e-14:
            gamma = math.inf if rr < 1.0 else -math.inf
        else:
            gamma = (1.0 - d * d - rr * rr) / (2.0 * rr * d)
        if gamma >= 1.0:
            # ring fully inside: uniform midpoint grid beats GL on circles
            m_full = max(8, 2 * m)
            phi = beta + TWO_PI * (np.arange(m_full) + 0.5) / m_full
            pw = np.full(m_full, TWO_PI / m_full)
        elif gamma <= -1.0:
            continue
        else:
            half = math.pi - math.acos(gamma)
            phi = beta + math.pi + half * gl_x
            pw = half * gl_w
        nodes.append(center + rr * np.exp(1j * phi))
        weights.append(rr * ww * pw)
        dists.append(np.full(len(phi), rr))
        # weights of the deepest rings underflow when multiplied out;
        # keep their logarithms so graded integrands can be summed safely
        log_weights.append(math.log(rr) + math.log(ww) + np.log(pw))
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        descriptor={
            "family": "polar",
            "center": center,
            "radial_order": int(radial_order),
            "angular_order": int(angular_order),
            "inner_cutoff": inner_cutoff,
        },
        aux={
            "center": center,
            "center_distance": np.concatenate(dists),
            "log_weight": np.concatenate(log_weights),
        },
    )


def singular_disc_rule(s, radial_order, angular_order) -> QuadratureRule:
    """Disc rule adapted to an integrand singular at the real point 1/s."""
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie strictly between 0 and 1")
    return polar_rule_at(1.0 / s, radial_order, angular_order)


def refine(rule: QuadratureRule, radial_factor=2.0, angular_factor=2.0) -> QuadratureRule:
    """Rebuild a rule with scaled orders (for convergence deltas)."""
    d = rule.descriptor
    radial = max(int(d["radial_order"] * radial_factor), d["radial_order"] + 1)
    angular = max(int(d["angular_order"] * angular_factor), d["angular_order"] + 1)
    if d["family"] == "disc":
        return disc_rule(radial, angular, cluster=d["cluster"], boost=d["boost"])
    if d["family"] == "polar":
        return polar_rule_at(d["center"], radial, angular, d["inner_cutoff"])
    raise ValueError(f"unknown rule family {d['family']!r}")


def _check_finite(values, where):
    if not np.all(np.isfinite(values)):
        bad = int(np.argmin(np.isfinite(values)))
        raise OverflowInIntegrand(f"non-finite integrand value near node #{bad} ({where})")


def integrate_polydisc(f, rule, n, symmetric=False, chunk=1 << 18):
    """Tensor-product integral of f over the polydisc D^n.

    ``f`` maps an (m, n) complex array of points to an (m,) array.  With
    ``symmetric=True`` (the integrand must be invariant under coordinate
    permutations) the tensor sum is restricted to sorted index tuples with
    multiset multiplicities, an exact reduction by up to n! in work.
    """
    nodes = np.asarray(rule.nodes)
    weights = np.asarray(rule.weights)
    size = len(nodes)
    if n == 1:
        vals = np.asarray(f(nodes[:, None]))
        _check_finite(vals, "n=1")
        return complex(np.sum(weights * vals))
    if symmetric and n == 2:
        return _integrate_symmetric_2(f, nodes, weights)
    if symmetric and n == 3:
        return _integrate_symmetric_3(f, nodes, weights, chunk)
    total = size**n
    shape = (size,) * n
    acc = 0.0 + 0.0j
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        multi = np.unravel_index(idx, shape)
        pts = np.stack([nodes[ix] for ix in multi], axis=1)
        w = weights[multi[0]].copy()
        for ix in multi[1:]:
            w *= weights[ix]
        vals = np.asarray(f(pts))
        _check_finite(vals, f"chunk at {start}")
        acc += np.sum(w * vals)
    return complex(acc)


def _integrate_symmetric_2(f, nodes, weights):
    size = len(nodes)
    j_idx, k_idx = np.triu_indices(size)
    pts = np.stack([nodes[j_idx], nodes[k_idx]], axis=1)
    w = weights[j_idx] * weights[k_idx]
    mult = np.where(j_idx == k_idx, 1.0, 2.0)
    vals = np.asarray(f(pts))
    _check_finite(vals, "symmetric n=2")
    return complex(np.sum(mult * w * vals))


def _integrate_symmetric_3(f, nodes, weights, chunk):
    size = len(nodes)
    acc = 0.0 + 0.0j
    for i in range(size):
        sub = size - i
        j_rel, k_rel = np.triu_indices(sub)
        j_idx, k_idx = j_rel + i, k_rel + i
        for start in range(0, len(j_idx), chunk):
            j_c = j_idx[start : start + chunk]
            k_c = k_idx[start : start + chunk]
            pts = np.stack(
                [np.full(len(j_c), nodes[i]), nodes[j_c], nodes[k_c]], axis=1
            )
            w = weights[i] * weights[j_c] * weights[k_c]
            mult = np.where(
                (i == j_c) & (j_c == k_c),
                1.0,
                np.where((i == j_c) | (j_c == k_c), 3.0, 6.0),
            )
            vals = np.asarray(f(pts))
            _check_finite(vals, f"symmetric n=3, i={i}")
            acc += np.sum(mult * w * vals)
    return complex(acc)


def monte_carlo_polydisc(f, sample_count, seed, n):
    """Plain Monte Carlo integral over D^n by rejection from the square.

    Returns (estimate, standard_error).  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    kept = []
    have = 0
    while have < sample_count:
        batch = max(4096, int(1.4 * (sample_count - have) / (math.pi / 4.0) ** n))
        pts = rng.uniform(-1.0, 1.0, (batch, n)) + 1j * rng.uniform(-1.0, 1.0, (batch, n))
        mask = np.all(np.abs(pts) < 1.0, axis=1)
        good = pts[mask][: sample_count - have]
        kept.append(good)
        have += len(good)
    pts = np.concatenate(kept)
    vals = np.asarray(f(pts))
    _check_finite(vals, "monte carlo")
    volume = math.pi**n
    estimate = volume * complex(np.mean(vals))
    stderr = volume * float(np.std(vals, ddof=1)) / math.sqrt(sample_count)
    return estimate, stderr


@dataclass(frozen=True)
class WeightSpec:
    """A positive weight on the polydisc (or the disc, for n = 1).

    kinds: ``constant`` (the weight 1), ``jacobian_power`` (modulus of the
    coordinate Vandermonde raised to ``exponent``), ``point_product``
    (product over reference points a of |a - w|^exponent, one variable).
    """

    kind: str
    exponent: float = 0.0
    points: tuple = ()

    @classmethod
    def constant(cls):
        return cls(kind="constant")

    @classmethod
    def jacobian_power(cls, exponent):
        return cls(kind="jacobian_power", exponent=float(exponent))

    @classmethod
    def point_product(cls, points, exponent):
        return cls(
            kind="point_product",
            exponent=float(exponent),
            points=tuple(complex(a) for a in points),
        )

    def evaluate(self, pts):
        pts = np.asarray(pts)
        if pts.ndim == 1:
            pts = pts[:, None]
        m, n = pts.shape
        if self.kind == "constant":
            return np.ones(m)
        if self.kind == "jacobian_power":
            out = np.ones(m)
            for j in range(n):
                for k in range(j + 1, n):
                    out *= np.abs(pts[:, j] - pts[:, k]) ** self.exponent
            return out
        if self.kind == "point_product":
            if n != 1:
                raise ValueError("point_product weights are one-variable weights")
            w = pts[:, 0]
            out = np.ones(m)
            for a in self.points:
                out *= np.abs(a - w) ** self.exponent
            return out
        raise ValueError(f"unknown weight kind {self.kind!r}")

    def singularities(self):
        """Points where the weight is singular (negative exponents only)."""
        if self.kind == "point_product" and self.exponent < 0:
            return self.points
        return ()


def weighted_lp_norm(f, p, weight, rule, n, symmetric=False):
    """The L^p norm of f against a weight, by tensor quadrature.

    ``symmetric=True`` is only sound when both f and the weight are
    symmetric under coordinate permutations.
    """
    if p <= 0:
        raise ValueError("p must be positive")

    def integrand(pts):
        return np.abs(np.asarray(f(pts))) ** p * weight.evaluate(pts)

    value = integrate_polydisc(integrand, rule, n, symmetric=symmetric).real
    return value ** (1.0 / p)
