"""Battery comparing exact symbolic results with the numeric oracle.

Each check prints ``name exact=<value> est=<value> err=<value> PASS|FAIL``
where ``err`` is ``|est - exact|`` and a check passes when ``err`` is below
its tolerance (3 standard errors for Monte Carlo, a fixed bound for
quadrature and closed forms) times ``tolerance_scale``.  A scale of 0 makes
every check with a nonzero error fail, which is how the harness itself
is tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_arith import c_nk
from .numeric_oracle import (
    McConfig,
    average_power_direct,
    average_product_quadrature,
    gaussian_descriptor_value,
    mc_average,
    mc_tensor_integral,
    solid_angle,
    solid_angle_by_quadrature,
)
from .sphere_average import average_power, average_product
from .subspace_reduction import evaluate_reduction, reduce_one_vector
from .tensor_core import iso_tensor, normalization, self_contraction

SUITES = ("smoke", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    exact: float
    estimate: float
    tolerance: float

    @property
    def error(self) -> float:
        return abs(self.estimate - self.exact)

    def passed(self, scale: float = 1.0) -> bool:
        return self.error <= self.tolerance * scale

    def line(self, scale: float = 1.0) -> str:
        status = "PASS" if self.passed(scale) else "FAIL"
        return (f"{self.name} exact={self.exact:.12g} est={self.estimate:.12g} "
                f"err={self.error:.3g} {status}")


def _mc(name, exact, vectors, cfg):
    est, se = mc_average(vectors, cfg)
    return CheckResult(name, float(exact), est, 3 * se)


def _random_vectors(rng, count, n):
    out = []
    while len(out) < count:
        v = tuple(int(x) for x in rng.integers(-3, 4, n))
        if any(v):
            out.append(v)
    return out


def _power_checks(seed, samples, dims, ks, stream0):
    out = []
    stream = stream0
    for n in dims:
        a = (0,) * (n - 1) + (1,)
        for k in ks:
            exact = average_power(a, 2 * k)
            cfg = McConfig(samples, seed, stream=stream)
            stream += 1
            out.append(_mc(f"avg_power_n{n}_k{k}_mc", exact, [a] * (2 * k), cfg))
    return out


def _odd_checks(seed, samples, stream0, n=3, counts=(1, 3, 5)):
    rng = np.random.default_rng(seed)
    out = []
    for j, m in enumerate(counts):
        vecs = _random_vectors(rng, m, n)
        exact = average_product(vecs)
        out.append(_mc(f"odd_product_m{m}_mc", exact, vecs, McConfig(samples, seed, stream=stream0 + j)))
    return out


def _product_checks(seed, samples, stream0, dims=(3,), quadrature=True):
    rng = np.random.default_rng(seed + 1)
    out = []
    for j, n in enumerate(dims):
        a, b = _random_vectors(rng, 2, n)
        vecs = [a, a, b, b]
        exact = average_product(vecs)
        out.append(_mc(f"product_aabb_n{n}_mc", exact, vecs, McConfig(samples, seed, stream=stream0 + j)))
        if quadrature:
            out.append(CheckResult(f"product_aabb_n{n}_quad", float(exact),
                                   average_product_quadrature(vecs), 1e-9))
    return out


def _solid_angle_checks(dims):
    out = []
    for n in dims:
        exact = solid_angle(n)
        est = solid_angle_by_quadrature(n)
        out.append(CheckResult(f"solid_angle_n{n}_quad", exact, est, 1e-9 * exact))
    return out


def _direct_checks(dims, ks):
    out = []
    for n in dims:
        for k in ks:
            exact = average_power((1,) + (0,) * (n - 1), k)
            tol = 1e-12 * max(abs(float(exact)), 1e-300)
            if exact == 0:
                tol = 1e-15
            out.append(CheckResult(f"avg_direct_n{n}_k{k}", float(exact),
                                   average_power_direct(1.0, k, n), tol))
    return out


def _normalization_checks(ranks):
    out = []
    for rank in ranks:
        value = normalization(iso_tensor(rank)).constant_value()
        out.append(CheckResult(f"normalization_rank{rank}", 1.0, float(value), 1e-15))
    return out


def _self_contraction_checks(ranks, n_value=3):
    out = []
    for rank in ranks:
        k = rank // 2
        formula = math.prod(range(2 * k - 1, 0, -2)) * c_nk(k).evaluate_at(n_value)
        value = self_contraction(rank).evaluate_at(n_value)
        out.append(CheckResult(f"self_contraction_rank{rank}_n{n_value}", float(formula),
                               float(value), 1e-15))
    return out


def _jacobian_check(seed, samples, stream):
    # (r^1)^2 via the angle sampler against the exact 1/3
    est, se = mc_average([(1, 0, 0), (1, 0, 0)], McConfig(samples, seed, stream=stream),
                         sampler="angles")
    return [CheckResult("jacobian_angles_n3_mc", 1 / 3, est, 3 * se)]


def reduction_end_to_end(seed, samples, rank=2, n_value=3, poly=(1.0, 0.5, 0.25), stream=0):
    """Compare MC components of ``int q..q exp(-q^2) P(q.a)`` with the reduced form."""
    a_hat = np.zeros(n_value)
    a_hat[-1] = 1.0
    result = reduce_one_vector(rank)
    values = {
        tuple(t.integrand.longitudinal_weights): gaussian_descriptor_value(
            t.integrand.transverse_power, t.integrand.longitudinal_weights, n_value, 1, poly)
        for t in result.terms
    }
    perp = np.eye(n_value) - np.outer(a_hat, a_hat)
    reduced = evaluate_reduction(result, n_value, values, unit_vectors={"a": a_hat}, perp=perp)
    est, se = mc_tensor_integral(rank, a_hat, poly, McConfig(samples, seed, stream=stream))
    return reduced, est, se


def _reduction_checks(seed, samples, ranks, stream0):
    out = []
    for j, rank in enumerate(ranks):
        reduced, est, se = reduction_end_to_end(seed, samples, rank, stream=stream0 + j)
        for idx in np.ndindex(*reduced.shape):
            if list(idx) != sorted(idx):
                continue  # symmetric copies carry no new information
            label = "".join(str(i + 1) for i in idx)
            # components that vanish identically have zero variance
            tol = 3 * se[idx] if se[idx] > 0 else 1e-12
            out.append(CheckResult(f"reduction_k{rank}_c{label}", reduced[idx], est[idx], tol))
    return out


def run_suite(suite: str = "smoke", seed: int = 0) -> list:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if suite == "smoke":
        checks = _power_checks(seed, 200_000, (3,), (1, 2, 3), 0)
        checks += _odd_checks(seed, 100_000, 100)
        checks += _product_checks(seed, 100_000, 200)
        checks += _solid_angle_checks(range(2, 7))
        checks += _direct_checks((3,), range(0, 9))
        checks += _normalization_checks((2, 4, 6))
        checks += _reduction_checks(seed, 100_000, (2,), 300)
        return checks
    checks = _power_checks(seed, 1_000_000, (2, 3, 4, 5), (1, 2, 3), 0)
    checks += _odd_checks(seed, 1_000_000, 100, n=4, counts=(1, 3, 5, 7))
    checks += _product_checks(seed, 1_000_000, 200, dims=(2, 3, 4, 5))
    checks += _solid_angle_checks(range(2, 9))
    checks += _direct_checks(range(2, 7), range(0, 17))
    checks += _normalization_checks((2, 4, 6, 8, 10, 12))
    checks += _self_contraction_checks((2, 4, 6, 8))
    checks += _jacobian_check(seed, 1_000_000, 400)
    checks += _reduction_checks(seed, 1_000_000, (2, 3), 300)
    return checks


def report(checks, tolerance_scale: float = 1.0) -> tuple:
    """``(text, all_passed)``; the text ends with ``ALL PASS`` or a failure count."""
    lines = [c.line(tolerance_scale) for c in checks]
    failed = sum(not c.passed(tolerance_scale) for c in checks)
    lines.append("ALL PASS" if not failed else f"{failed} of {len(checks)} FAILED")
    return "\n".join(lines) + "\n", not failed


def exact_fraction(x) -> Fraction:
    return Fraction(x)
