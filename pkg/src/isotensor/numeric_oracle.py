"""Independent numerical checks: spherical coordinates, solid angles,
adaptive quadrature and Monte Carlo averages over the unit sphere.

Nothing here uses the symbolic tensor machinery; it is the second route
against which the exact results are compared.

Monte Carlo determinism: samples are drawn in fixed-size chunks and chunk
``c`` uses the generator ``SeedSequence(seed, spawn_key=(stream, c))``.
Per-chunk sums are combined in chunk order, so results do not depend on
how many worker threads were used.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DimensionError, QuadratureError, RangeError

CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# spherical coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalPoint:
    """Polar angles ``theta_1..theta_(n-2)`` in [0, pi] and azimuth in [0, 2 pi)."""

    polar_angles: tuple = ()
    azimuth: float = 0.0

    @property
    def n_value(self) -> int:
        return len(self.polar_angles) + 2


def _check_angles(thetas, phi):
    if any(not 0.0 <= t <= math.pi for t in thetas):
        raise RangeError("polar angles must lie in [0, pi]")
    if not 0.0 <= phi < 2 * math.pi:
        raise RangeError("azimuth must lie in [0, 2 pi)")


def to_cartesian(p: SphericalPoint, n_value: int | None = None) -> np.ndarray:
    """Unit vector with ``r1 = cos t1, r2 = sin t1 cos t2, ...,
    r(n-1) = sin t1...sin t(n-2) sin phi, rn = sin t1...sin t(n-2) cos phi``."""
    thetas = tuple(float(t) for t in p.polar_angles)
    n = len(thetas) + 2
    if n_value is not None and n_value != n:
        raise DimensionError(f"{len(thetas)} polar angles describe n={n}, not {n_value}")
    _check_angles(thetas, float(p.azimuth))
    return angles_to_cartesian(np.array([thetas]).reshape(1, n - 2), np.array([p.azimuth]))[0]


def angles_to_cartesian(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Vectorized :func:`to_cartesian`; ``thetas`` has shape ``(count, n-2)``."""
    count, npolar = thetas.shape
    out = np.empty((count, npolar + 2))
    s = np.ones(count)
    for j in range(npolar):
        out[:, j] = s * np.cos(thetas[:, j])
        s = s * np.sin(thetas[:, j])
    out[:, -2] = s * np.sin(phis)
    out[:, -1] = s * np.cos(phis)
    return out


# ---------------------------------------------------------------------------
# solid angles
# ---------------------------------------------------------------------------

def solid_angle(n_value: int) -> float:
    """``2 pi^(n/2) / Gamma(n/2)``."""
    if n_value < 1:
        raise RangeError("n must be >= 1")
    return 2.0 * math.exp(0.5 * n_value * math.log(math.pi) - gammaln(0.5 * n_value))


def solid_angle_exact(n_value: int) -> tuple:
    """``(c, p)`` with the solid angle equal to ``c * pi^p``, ``c`` rational."""
    if n_value < 1:
        raise RangeError("n must be >= 1")
    if n_value % 2 == 0:
        return Fraction(2, math.factorial(n_value // 2 - 1)), n_value // 2
    df = math.prod(range(n_value - 2, 0, -2))
    return Fraction(2 ** ((n_value + 1) // 2), df), (n_value - 1) // 2


def _quad(f, a, b, tol, **kw):
    # convergence is judged from the returned error estimate, not warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, epsabs=tol * 0.1, epsrel=tol * 0.1, limit=200, **kw)
    if not math.isfinite(value) or err > tol * max(1.0, abs(value)):
        raise QuadratureError(f"quadrature did not reach {tol:g}", err)
    return value


def solid_angle_by_quadrature(n_value: int, tol: float = 1e-10) -> float:
    """Iterated integral ``int dphi prod_j int dz_j (1 - z_j^2)^((n-2-j)/2)``."""
    if not 2 <= n_value <= 8:
        raise RangeError("quadrature solid angle supports 2 <= n <= 8")
    total = _quad(lambda phi: 1.0, 0.0, 2 * math.pi, tol)
    for j in range(1, n_value - 1):
        power = (n_value - 2 - j) / 2
        total *= _quad(lambda z, p=power: (1.0 - z * z) ** p, -1.0, 1.0, tol)
    return total


# ---------------------------------------------------------------------------
# closed forms and quadrature for sphere averages
# ---------------------------------------------------------------------------

def integral_table(a: float, b: int) -> float:
    """``int_{-1}^{1} (1 - x^2)^a x^b dx`` in closed form (``a > -1``)."""
    if b % 2:
        return 0.0
    return math.exp(gammaln(1 + a) + gammaln((b + 1) / 2) - gammaln(a + b / 2 + 1.5))


def average_power_direct(a_sq: float, k_exponent: int, n_value: int) -> float:
    """``<(a.r)^k> = |a|^k Gamma(n/2) Gamma((k+1)/2) / (sqrt(pi) Gamma((n+k)/2))``."""
    if n_value < 2:
        raise RangeError("n must be >= 2")
    if k_exponent % 2:
        return 0.0
    log_val = (
        gammaln(n_value / 2) + gammaln((k_exponent + 1) / 2)
        - 0.5 * math.log(math.pi) - gammaln((n_value + k_exponent) / 2)
    )
    return float(a_sq) ** (k_exponent / 2) * math.exp(log_val)


def average_power_table(a_sq: float, k_exponent: int, n_value: int) -> float:
    """Same average through the integral table; the ``theta_1`` integral is
    the only one that involves ``a`` once ``a`` points along axis 1."""
    if n_value < 2:
        raise RangeError("n must be >= 2")
    if n_value == 2:
        # <sin^k phi> over the circle
        return average_power_quadrature(a_sq, k_exponent, 2)
    a = (n_value - 3) / 2
    return float(a_sq) ** (k_exponent / 2) * integral_table(a, k_exponent) / integral_table(a, 0)


def average_power_quadrature(a_sq: float, k_exponent: int, n_value: int,
                             tol: float = 1e-11) -> float:
    """``<(a.r)^k>`` by adaptive quadrature over ``z = cos theta_1``."""
    if n_value < 2:
        raise RangeError("n must be >= 2")
    scale = float(a_sq) ** (k_exponent / 2)
    if n_value == 2:
        num = _quad(lambda phi: math.sin(phi) ** k_exponent, 0.0, 2 * math.pi, tol)
        return scale * num / (2 * math.pi)
    p = (n_value - 3) / 2
    num = _quad(lambda z: z ** k_exponent * (1 - z * z) ** p, -1.0, 1.0, tol)
    den = _quad(lambda z: (1 - z * z) ** p, -1.0, 1.0, tol)
    return scale * num / den


def monomial_average_quadrature(exponents, tol: float = 1e-11) -> float:
    """``<prod_j (r^j)^(k_j)>`` as a product of one-dimensional integrals.

    The ``theta_j`` integral is ``int z^(k_j) (1-z^2)^((n-2-j+K_j)/2) dz``
    with ``K_j = sum_{l>j} k_l``; the azimuth carries ``sin^(k_(n-1))
    cos^(k_n)``.
    """
    exponents = tuple(int(e) for e in exponents)
    n = len(exponents)
    if n < 2:
        raise RangeError("n must be >= 2")
    if any(e < 0 for e in exponents):
        raise RangeError("exponents must be non-negative")
    total = 1.0
    for j in range(1, n - 1):
        kj = exponents[j - 1]
        if kj % 2:
            return 0.0
        tail = sum(exponents[j:])
        p = (n - 2 - j + tail) / 2
        total *= _quad(lambda z, p=p, kj=kj: z ** kj * (1 - z * z) ** p, -1.0, 1.0, tol)
    ks, kc = exponents[-2], exponents[-1]
    if ks % 2 or kc % 2:
        return 0.0
    total *= _quad(lambda phi: math.sin(phi) ** ks * math.cos(phi) ** kc, 0.0, 2 * math.pi, tol)
    return total / solid_angle(n)


def average_product_quadrature(vectors, n_value: int | None = None) -> float:
    """``<prod_i (a_i . r)>`` by expanding into monomials and integrating each."""
    vecs = [np.asarray([float(x) for x in v]) for v in vectors]
    if not vecs:
        return 1.0
    dims = {len(v) for v in vecs}
    if len(dims) > 1:
        raise DimensionError(f"vectors have mismatched dimensions {sorted(dims)}")
    n = dims.pop()
    if n_value is not None and n_value != n:
        raise DimensionError(f"vectors have dimension {n}, not {n_value}")
    coeffs: dict = {}
    for combo in product(range(n), repeat=len(vecs)):
        c = math.prod(v[i] for v, i in zip(vecs, combo))
        if c:
            key = tuple(combo.count(i) for i in range(n))
            coeffs[key] = coeffs.get(key, 0.0) + c
    total = 0.0
    for key in sorted(coeffs):
        if all(e % 2 == 0 for e in key):
            total += coeffs[key] * monomial_average_quadrature(key)
    return total


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McConfig:
    sample_count: int = 100_000
    seed: int = 0
    antithetic: bool = False
    stream: int = 0

    def __post_init__(self):
        if self.sample_count < 1:
            raise RangeError("sample_count must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise RangeError("seed must be an unsigned 64-bit integer")


def chunk_rng(cfg: McConfig, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(cfg.stream, chunk)))


def sample_sphere(count: int, n_value: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on S^(n-1) from normalized Gaussian draws."""
    x = rng.standard_normal((count, n_value))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sample_angles(count: int, n_value: int, rng: np.random.Generator):
    """Angles distributed with the spherical Jacobian ``prod sin^(n-1-j) theta_j``.

    Each ``theta_j`` is drawn by rejection against ``sin^(n-1-j)``; ``phi``
    is uniform.  Returns ``(thetas, phis)``.
    """
    if n_value < 2:
        raise RangeError("n must be >= 2")
    thetas = np.empty((count, n_value - 2))
    for j in range(1, n_value - 1):
        power = n_value - 1 - j
        out = np.empty(0)
        while out.size < count:
            t = rng.uniform(0.0, math.pi, 2 * (count - out.size) + 16)
            u = rng.uniform(0.0, 1.0, t.size)
            out = np.concatenate([out, t[u < np.sin(t) ** power]])
        thetas[:, j - 1] = out[:count]
    phis = rng.uniform(0.0, 2 * math.pi, count)
    return thetas, phis


def _chunk_sizes(total: int):
    full, rest = divmod(total, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _run_chunks(fn, sizes, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(len(sizes)), sizes))
    return [fn(c, s) for c, s in enumerate(sizes)]


def _mean_and_se(parts):
    parts = np.array(parts)
    count = parts[:, 0].sum()
    s1 = np.sum(parts[:, 1])
    s2 = np.sum(parts[:, 2])
    mean = s1 / count
    if count < 2:
        return float(mean), float("inf")
    var = max(s2 - count * mean * mean, 0.0) / (count - 1)
    return float(mean), float(math.sqrt(var / count))


def mc_average(vectors, cfg: McConfig, n_value: int | None = None, *, workers: int = 1,
               sampler: str = "gaussian"):
    """Monte Carlo ``<prod_i (a_i . r)>`` as ``(estimate, standard_error)``.

    ``sampler="angles"`` draws through :func:`sample_angles` instead; it is
    there only to cross-check the spherical Jacobian.
    """
    if not vectors:
        return 1.0, 0.0
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise DimensionError(f"vectors have mismatched dimensions {sorted(dims)}")
    n = dims.pop()
    mat = np.array([[float(x) for x in v] for v in vectors], dtype=float)
    if n_value is not None and n_value != n:
        raise DimensionError(f"vectors have dimension {n}, not {n_value}")
    if sampler not in ("gaussian", "angles"):
        raise ValueError(f"unknown sampler {sampler!r}")

    def draw(rng, count):
        if sampler == "gaussian":
            return sample_sphere(count, n, rng)
        return angles_to_cartesian(*sample_angles(count, n, rng))

    def chunk(c, size):
        rng = chunk_rng(cfg, c)
        if cfg.antithetic:
            pairs = (size + 1) // 2
            r = draw(rng, pairs)
            proj = r @ mat.T
            y = 0.5 * (np.prod(proj, axis=1) + np.prod(-proj, axis=1))
        else:
            y = np.prod(draw(rng, size) @ mat.T, axis=1)
        return (y.size, np.sum(y), np.sum(y * y))

    return _mean_and_se(_run_chunks(chunk, _chunk_sizes(cfg.sample_count), workers))


def mc_function_average(fn, n_value: int, cfg: McConfig, *, workers: int = 1):
    """Sphere average of ``fn(points) -> values`` with the same chunking."""

    def chunk(c, size):
        y = np.asarray(fn(sample_sphere(size, n_value, chunk_rng(cfg, c))), dtype=float)
        return (y.size, np.sum(y), np.sum(y * y))

    return _mean_and_se(_run_chunks(chunk, _chunk_sizes(cfg.sample_count), workers))


# ---------------------------------------------------------------------------
# Gaussian-weighted tensor integrals
# ---------------------------------------------------------------------------

def _poly(coeffs, x):
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float))


def mc_tensor_integral(rank: int, a_hat, poly_coeffs, cfg: McConfig, *, workers: int = 1):
    """``int d^n q q^i1..q^ik exp(-q^2) P(q . a_hat)`` by Monte Carlo.

    ``q`` is drawn from the normal density ``exp(-q^2)/pi^(n/2)``, so the
    integral is ``pi^(n/2)`` times the sample mean.  Returns component
    arrays ``(estimate, standard_error)`` of shape ``(n,)*rank``.
    """
    a_hat = np.asarray([float(x) for x in a_hat])
    n = a_hat.size
    weight = math.pi ** (n / 2)

    def chunk(c, size):
        q = chunk_rng(cfg, c).normal(0.0, math.sqrt(0.5), (size, n))
        w = _poly(poly_coeffs, q @ a_hat)
        t = w
        for _ in range(rank):
            t = t[..., None] * q.reshape((size,) + (1,) * (t.ndim - 1) + (n,))
        return size, t.sum(axis=0), (t * t).sum(axis=0)

    parts = _run_chunks(chunk, _chunk_sizes(cfg.sample_count), workers)
    count = sum(p[0] for p in parts)
    s1 = np.sum(np.stack([p[1] for p in parts]), axis=0)
    s2 = np.sum(np.stack([p[2] for p in parts]), axis=0)
    mean = s1 / count
    var = np.maximum(s2 - count * mean * mean, 0.0) / (count - 1)
    return weight * mean, weight * np.sqrt(var / count)


def radial_integral(power: int, dim: int, tol: float = 1e-11) -> float:
    """``int d^dim p |p|^power exp(-p^2)`` as ``Omega(dim) int_0^inf rho^(dim-1+power) e^(-rho^2)``."""
    if dim == 0:
        return 1.0 if power == 0 else 0.0
    m = dim - 1 + power
    return solid_angle(dim) * _quad(lambda r: r ** m * math.exp(-r * r), 0.0, np.inf, tol)


def longitudinal_integral(r: int, poly_coeffs, tol: float = 1e-11) -> float:
    """``int_-inf^inf x^r P(x) exp(-x^2) dx``."""
    return _quad(lambda x: x ** r * float(_poly(poly_coeffs, x)) * math.exp(-x * x),
                 -np.inf, np.inf, tol)


def gaussian_descriptor_value(transverse_power: int, axes, n_value: int, m_parallel: int,
                              poly_coeffs) -> float:
    """Value of ``int_q |q_perp|^p prod(q.e_p) exp(-q^2) P(q.e_1)``.

    The integral factorizes into one longitudinal integral per basis axis
    (``P`` attaches to axis 1) and a radial integral over the
    ``n - m`` dimensional transverse space.
    """
    total = radial_integral(transverse_power, n_value - m_parallel)
    for axis in range(1, m_parallel + 1):
        power = list(axes).count(axis)
        coeffs = poly_coeffs if axis == 1 else (1.0,)
        total *= longitudinal_integral(power, coeffs)
    return total
