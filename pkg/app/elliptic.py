"""
Numeric q-series engine for the genus-one superpotential.

    lam   = t1 + (pi I / 4) (t2)^2 d^2/dp^2 log theta1(p, t3)
    F     = (t1)^2 t3 / 2 + t1 (t2)^2 / 2 - (pi I / 48) (t2)^4 E2(t3)
    Omega = t1 p + (pi I / 4) (t2)^2 d/dp log theta1(p, t3)

theta1 uses the nome exp(pi I tau (n + 1/2)^2), E2 uses q = exp(2 pi I tau).
Derivatives of log theta1 in p and tau are computed as jets: p-derivatives
from the series, tau-derivatives through the heat relation
d theta1 / d tau = -(pi I / 4) d^2 theta1 / dp^2.
"""
import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .coefring import CoefElement
from .config import settings
from .errors import NumericRefusal
from .schemas import CheckResult, Residual

logger = logging.getLogger(__name__)

PI_I = math.pi * 1j
HEAT = -PI_I / 4
LAMBDA_FACTOR = PI_I / 4
F_FACTOR = -PI_I / 48


@dataclass(frozen=True)
class EllipticParams:
    tau: complex
    q_terms: int = 40

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ValueError(f"Im(tau) must be positive, got {self.tau}")
        if self.q_terms < 1:
            raise ValueError("q_terms must be at least 1")


def sorted_sum(values) -> complex:
    """Magnitude-sorted compensated sum"""
    ordered = sorted((complex(v) for v in values), key=abs)
    return complex(math.fsum(v.real for v in ordered), math.fsum(v.imag for v in ordered))


def relative_residual(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


# theta1


def _theta_terms(p: complex, params: EllipticParams, k: int, tau_order: int = 0) -> np.ndarray:
    n = np.arange(params.q_terms)
    a = 2 * n + 1
    weights = (-1.0) ** n * np.exp(PI_I * params.tau * (n + 0.5) ** 2)
    if tau_order:
        weights = weights * (PI_I * (n + 0.5) ** 2) ** tau_order
    return 2 * weights * a.astype(float) ** k * np.sin(a * complex(p) + k * math.pi / 2)


def theta1(p: complex, params: EllipticParams) -> complex:
    return sorted_sum(_theta_terms(p, params, 0))


def theta1_d(p: complex, params: EllipticParams, k: int = 1) -> complex:
    """k-th derivative in p"""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    return sorted_sum(_theta_terms(p, params, k))


def theta1_tau_d(p: complex, params: EllipticParams) -> complex:
    return sorted_sum(_theta_terms(p, params, 0, tau_order=1))


def theta1_truncation(p: complex, params: EllipticParams) -> float:
    """Magnitude of the last retained term"""
    return float(abs(_theta_terms(p, params, 0)[-1]))


# Eisenstein E2


@lru_cache(maxsize=None)
def _sigma1(n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d
            if d * d != n:
                total += n // d
        d += 1
    return total


def e2_d(tau: complex, N: int, order: int = 1) -> complex:
    """order-th tau-derivative of E2 from its q-expansion"""
    q = cmath.exp(2 * PI_I * tau)
    terms = [-24 * _sigma1(n) * (2 * PI_I * n) ** order * q ** n for n in range(1, N + 1)]
    return sorted_sum(terms)


def e2(tau: complex, N: int) -> complex:
    q = cmath.exp(2 * PI_I * tau)
    return sorted_sum([1.0] + [-24 * _sigma1(n) * q ** n for n in range(1, N + 1)])


def e2_lattice(tau: complex, M: int = 400) -> complex:
    """
    E2 from the Eisenstein-ordered lattice sum (m inside n, |m|, |n| <= M).

    The m-tail beyond M is added in closed form with the trigamma function.
    """
    tau = complex(tau)
    m = np.arange(-M, M + 1)
    total = []
    for n in range(-M, M + 1):
        if n == 0:
            continue
        inner = np.sum(1.0 / (m + n * tau) ** 2)
        tail = complex(mpmath.psi(1, M + 1 + n * tau)) + complex(mpmath.psi(1, M + 1 - n * tau))
        total.append(inner + tail)
    return 1 + 3 / math.pi ** 2 * sorted_sum(total)


# jets of log theta1


class LogThetaJets:
    """
    p-derivatives of l = log theta1, X = d l / d tau and Y = d X / d tau at one point.

    l[k], X[k], Y[k] are the k-th p-derivatives.
    """

    def __init__(self, p: complex, params: EllipticParams, order: int = 4):
        theta = theta1(p, params)
        if abs(theta) < 1e-14:
            raise NumericRefusal(f"p = {p} is a zero of theta1")
        depth = order + 5
        r = [theta1_d(p, params, k) / theta for k in range(depth + 1)]
        l = [cmath.log(theta)] + [0j] * depth
        for n in range(1, depth + 1):
            l[n] = r[n] - sum(comb(n - 1, j) * r[j] * l[n - j] for j in range(1, n))
        self.l = l

        def square_of_first(k: int) -> complex:
            return sum(comb(k, j) * l[j + 1] * l[k - j + 1] for j in range(k + 1))

        x_depth = depth - 2
        self.X = [HEAT * (l[k + 2] + square_of_first(k)) for k in range(x_depth + 1)]
        y_depth = x_depth - 2
        self.Y = [
            HEAT * (self.X[k + 2] + 2 * sum(comb(k, j) * l[j + 1] * self.X[k - j + 1] for j in range(k + 1)))
            for k in range(y_depth + 1)
        ]


def g1_numeric(params: EllipticParams) -> complex:
    """g1 making the Weierstrass function free of a constant term at p = 0"""
    constant = theta1_d(0, params, 3) / (3 * theta1_d(0, params, 1))
    return -constant / (4 * PI_I)


def g1_closed_form(tau: complex, N: int) -> complex:
    return e2(tau, N) / (12 * PI_I)


def _lattice_distance(p: complex, tau: complex) -> float:
    # theta1 vanishes at pi (m + n tau)
    x = complex(p) / math.pi
    n = round(x.imag / tau.imag)
    best = float("inf")
    for dn in (-1, 0, 1):
        rest = x - (n + dn) * tau
        m = round(rest.real)
        for dm in (-1, 0, 1):
            best = min(best, abs(rest - (m + dm)) * math.pi)
    return best


def weierstrass(p: complex, tau: complex, N: int = 40) -> Tuple[complex, complex]:
    """(zeta(p), wp(p)) from log theta1 and g1"""
    params = EllipticParams(complex(tau), N)
    if _lattice_distance(p, params.tau) < 1e-8:
        raise NumericRefusal(f"p = {p} is within 1e-8 of a lattice point")
    jets = LogThetaJets(p, params, order=0)
    g1 = g1_numeric(params)
    zeta = jets.l[1] + 4 * PI_I * g1 * p
    wp = -jets.l[2] - 4 * PI_I * g1
    return zeta, wp


# verification of the genus-one pair


@dataclass
class H11Sample:
    t: Tuple[complex, complex, complex]
    p: complex


@dataclass
class EllipticReport:
    checks: List[CheckResult]
    table: List[Dict[str, Any]]
    settings: Dict[str, Any]
    notes: List[str] = field(default_factory=list)


def h11_eta() -> List[List[CoefElement]]:
    """eta read off exactly from the polynomial part of F"""
    t1, t2, t3 = (CoefElement.var(j) for j in (1, 2, 3))
    polynomial_part = (t1 * t1 * t3 + t1 * t2 * t2) / 2
    first = polynomial_part.derive(1)
    return [[first.derive(j).derive(k) for k in (1, 2, 3)] for j in (1, 2, 3)]


def _structure_constants(t2: complex, tau: complex, N: int, c333_shift: complex) -> Dict[Tuple[int, int, int], complex]:
    e = [e2(tau, N)] + [e2_d(tau, N, k) for k in (1, 2, 3)]
    c = {
        (1, 1, 3): 1.0,
        (1, 2, 2): 1.0,
        (2, 2, 2): 24 * F_FACTOR * t2 * e[0],
        (2, 2, 3): 12 * F_FACTOR * t2 ** 2 * e[1],
        (2, 3, 3): 4 * F_FACTOR * t2 ** 3 * e[2],
        (3, 3, 3): F_FACTOR * t2 ** 4 * e[3] + c333_shift,
    }
    return c


def _c_lower(c: Dict[Tuple[int, int, int], complex], a: int, b: int, g: int) -> complex:
    return c.get(tuple(sorted((a, b, g))), 0.0)


def _c_raised(c, g: int, a: int, b: int) -> complex:
    # eta^{-1} is the antidiagonal pattern of eta
    return _c_lower(c, 4 - g, a, b)


def _evaluate_sample(sample: H11Sample, params_N: int, c333_shift: complex) -> Dict[str, Any]:
    _, t2, tau = sample.t
    p = sample.p
    params = EllipticParams(tau, params_N)
    if _lattice_distance(p, params.tau) < 1e-6:
        raise NumericRefusal(f"sample p = {p} is too close to a lattice point")
    jets = LogThetaJets(p, params, order=4)
    l, X, Y = jets.l, jets.X, jets.Y
    k = LAMBDA_FACTOR

    lam_p = [k * t2 ** 2 * l[3], k * t2 ** 2 * l[4]]
    if abs(lam_p[0]) < 1e-6 * max(1.0, abs(k * t2 ** 2 * l[2])):
        raise NumericRefusal(f"sample p = {p} is too close to a critical point")
    # d_a lam and its p-derivative
    d = {1: (1.0, 0.0), 2: (2 * k * t2 * l[2], 2 * k * t2 * l[3]), 3: (k * t2 ** 2 * X[2], k * t2 ** 2 * X[3])}
    second = {
        (1, 1): 0.0, (1, 2): 0.0, (1, 3): 0.0,
        (2, 2): 2 * k * l[2], (2, 3): 2 * k * t2 * X[2], (3, 3): k * t2 ** 2 * Y[2],
    }
    omega_tt = {
        (1, 1): 0.0, (1, 2): 0.0, (1, 3): 0.0,
        (2, 2): 2 * k * l[1], (2, 3): 2 * k * t2 * X[1], (3, 3): k * t2 ** 2 * Y[1],
    }
    c = _structure_constants(t2, tau, params_N, c333_shift)

    main, open_first, open_second, delta = [], [], [], []
    for a in (1, 2, 3):
        for b in range(a, 4):
            num = d[a][0] * d[b][0] - sum(_c_raised(c, g, a, b) * d[g][0] for g in (1, 2, 3))
            num_p = (
                d[a][1] * d[b][0] + d[a][0] * d[b][1] - sum(_c_raised(c, g, a, b) * d[g][1] for g in (1, 2, 3))
            )
            rhs = num / lam_p[0]
            rhs_p = (num_p * lam_p[0] - num * lam_p[1]) / lam_p[0] ** 2
            main.append(relative_residual(second[(a, b)], rhs_p))
            delta.append(abs(rhs - omega_tt[(a, b)]))
            lhs2 = sum(_c_raised(c, g, a, b) * d[g][0] for g in (1, 2, 3)) + omega_tt[(a, b)] * lam_p[0]
            open_second.append(relative_residual(lhs2, d[a][0] * d[b][0]))

    def omega(a: int, b: int) -> complex:
        return omega_tt[(min(a, b), max(a, b))]

    for a in (1, 2, 3):
        for g in range(a + 1, 4):
            for b in (1, 2, 3):
                left = sum(_c_raised(c, m, a, b) * omega(m, g) for m in (1, 2, 3)) + omega(a, b) * d[g][0]
                right = sum(_c_raised(c, m, g, b) * omega(m, a) for m in (1, 2, 3)) + omega(g, b) * d[a][0]
                open_first.append(relative_residual(left, right))
    return {
        **_coordinates(sample),
        "main_identity": max(main),
        "main_identity_11": main[0],
        "open_wdvv": max(open_first + open_second),
        "omega_tilde": max(delta),
    }


def _coordinates(sample: H11Sample) -> Dict[str, Any]:
    return {
        "t": [[complex(z).real, complex(z).imag] for z in sample.t],
        "p": [complex(sample.p).real, complex(sample.p).imag],
    }


def _evaluate_or_refuse(sample: H11Sample, params_N: int, c333_shift: complex) -> Dict[str, Any]:
    try:
        return _evaluate_sample(sample, params_N, c333_shift)
    except NumericRefusal as e:
        logger.warning(f"genus-one sample at p = {sample.p} refused ({e})")
        return {**_coordinates(sample), "refused": str(e)}


def draw_samples(count: int, seed: int) -> List[H11Sample]:
    """Seeded samples: |Re p| <= 1, 0.2 <= Im p <= 0.8, 0.8 <= Im t3 <= 2, t1 and t2 in an annulus"""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        t1 = cmath.rect(rng.uniform(0.5, 1.5), rng.uniform(0, 2 * math.pi))
        t2 = cmath.rect(rng.uniform(0.5, 1.5), rng.uniform(0, 2 * math.pi))
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
        p = complex(rng.uniform(-1.0, 1.0), rng.uniform(0.2, 0.8))
        out.append(H11Sample((t1, t2, tau), p))
    return out


def h11_verify(
    t_samples: Optional[Sequence[Tuple[complex, complex, complex]]] = None,
    p_samples: Optional[Sequence[complex]] = None,
    q_terms: Optional[int] = None,
    tol: Optional[float] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    c333_shift: complex = 0.0,
) -> EllipticReport:
    """
    Numeric verification of the genus-one pair at seeded or given samples.

    Args:
        t_samples, p_samples: explicit sample points (drawn from the seed when omitted)
        q_terms: theta and E2 truncation
        tol: pass threshold for every residual
        samples: number of seeded samples
        seed: generator seed
        c333_shift: perturbation of c_333 (negative control)

    Returns:
        EllipticReport with main-identity, open-WDVV and correction checks
    """
    q_terms = q_terms or settings.q_terms
    tol = tol or settings.tol
    seed = settings.seed if seed is None else seed
    if t_samples is not None:
        if p_samples is None or len(p_samples) != len(t_samples):
            raise ValueError("t_samples and p_samples must have the same length")
        points = [H11Sample(tuple(complex(x) for x in t), complex(p)) for t, p in zip(t_samples, p_samples)]
    else:
        points = draw_samples(samples or settings.samples, seed)

    logger.info(f"Step 1: evaluating {len(points)} genus-one samples with N={q_terms}")
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        table = list(pool.map(lambda s: _evaluate_or_refuse(s, q_terms, c333_shift), points))

    refused = [f"sample {i + 1} refused: {row['refused']}" for i, row in enumerate(table) if "refused" in row]
    evaluated = [(i, row) for i, row in enumerate(table) if "refused" not in row]
    checks = []
    for key, name in (("main_identity", "main_identity"), ("open_wdvv", "open_wdvv"), ("omega_tilde", "omega_tilde_p_free")):
        values = [(i, row[key]) for i, row in evaluated]
        worst = max((v for _, v in values), default=0.0)
        residuals = [Residual(index=[i + 1], value=f"{v:.17g}", magnitude=v) for i, v in values if v > tol]
        notes = list(refused) + ([] if values else ["no sample could be evaluated"])
        passed = bool(values) and worst <= tol
        checks.append(CheckResult(name=name, passed=passed, residuals=residuals, max_residual=worst, notes=notes))

    eta = h11_eta()
    expected = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    eta_ok = all(eta[i][j] == CoefElement.const(expected[i][j]) for i in range(3) for j in range(3))
    checks.append(CheckResult(name="eta_antidiagonal", passed=eta_ok))

    tau0 = points[0].t[2] if points else 1j
    params0 = EllipticParams(tau0, q_terms)
    g1_num, g1_closed = g1_numeric(params0), g1_closed_form(tau0, q_terms)
    notes = [
        "lambda carries the factor pi*I/4 on (t2)^2 d^2 log theta1",
        "the E2 term of F carries (t2)^4",
        "heat relation: d theta1/d tau = -(pi*I/4) d^2 theta1/dp^2",
        f"g1 at tau={tau0}: numeric {g1_num!r}, E2/(12 pi I) {g1_closed!r}",
    ]
    return EllipticReport(
        checks=checks,
        table=table,
        settings={"q_terms": q_terms, "tol": tol, "seed": seed, "samples": len(points), "c333_shift": repr(c333_shift)},
        notes=notes,
    )
