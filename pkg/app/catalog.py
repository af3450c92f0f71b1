"""
Built-in superpotential families with Euler weights, calibration maps and
the potentials printed for them in the literature.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .coefring import CoefElement, I, ONE, SQRT2, ZERO, t
from .errors import CatalogError
from .frobenius import EulerWeights, SuperpotentialSpec, euler_weights_from_degrees, flat_polynomial_family
from .laurent import AFFINE, Chart, LaurentPoly
from .openwdvv import OpenPotential
from .schemas import CalibrationComparison, CatalogListing

logger = logging.getLogger(__name__)

EXP_REAL = Chart("exp", "1")
EXP_IMAG = Chart("exp", "i")


@dataclass(frozen=True)
class Calibration:
    """t_j -> t_scale[j] t_j, F -> F_scale F, Omega -> Omega_scale Omega"""

    t_scale: Tuple[Tuple[int, Fraction], ...] = ()
    F_scale: Fraction = Fraction(1)
    Omega_scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.F_scale == 0 or self.Omega_scale == 0 or any(a == 0 for _, a in self.t_scale):
            raise CatalogError("calibration map must be invertible")

    @property
    def scales(self) -> Dict[int, Fraction]:
        return dict(self.t_scale)

    def is_identity(self) -> bool:
        return self.F_scale == 1 and self.Omega_scale == 1 and all(a == 1 for _, a in self.t_scale)

    def transport_F(self, F: CoefElement) -> CoefElement:
        return F.substitute_scaling(self.scales) * self.F_scale

    def transport_Omega(self, omega: OpenPotential) -> OpenPotential:
        return omega.scaled(self.scales, self.Omega_scale)

    def describe(self) -> Dict[str, str]:
        return {
            "t_scale": ", ".join(f"t{j} -> {a}*t{j}" for j, a in self.t_scale) or "identity",
            "F_scale": str(self.F_scale),
            "Omega_scale": str(self.Omega_scale),
        }


IDENTITY = Calibration()


@dataclass
class PrintedSolution:
    F: Optional[CoefElement] = None
    Omega: Optional[OpenPotential] = None
    F_text: Optional[str] = None
    Omega_text: Optional[str] = None
    notes: List[str] = field(default_factory=list)


@dataclass
class CatalogEntry:
    name: str
    description: str
    mode: str
    spec: Optional[SuperpotentialSpec]
    calibration: Calibration = IDENTITY
    printed_solution: Optional[PrintedSolution] = None
    euler_weights: Optional[EulerWeights] = None
    parameters: Dict[str, int] = field(default_factory=dict)

    def label(self) -> str:
        if not self.parameters:
            return self.name
        args = ",".join(f"{k}={v}" for k, v in self.parameters.items())
        return f"{self.name}({args})"


def _names(n: int) -> List[str]:
    return [f"t{j}" for j in range(1, n + 1)]


def _laurent(chart: Chart, coeffs: Dict[int, CoefElement]) -> LaurentPoly:
    return LaurentPoly(chart, coeffs)


def _h0_1() -> CatalogEntry:
    lam = _laurent(AFFINE, {2: ONE, 0: t(1)})
    weights = EulerWeights(q=[0], r=[0], d=0)
    printed = PrintedSolution(
        F=t(1, 3) / 6,
        Omega=OpenPotential(_laurent(AFFINE, {3: CoefElement.const(Fraction(1, 3)), 1: t(1)})),
    )
    return CatalogEntry(
        name="h0_1",
        description="lam = p^2 + t1",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(1), weights, name="h0_1"),
        calibration=Calibration(F_scale=Fraction(2)),
        printed_solution=printed,
        euler_weights=weights,
    )


def _h0_2() -> CatalogEntry:
    lam = _laurent(AFFINE, {3: ONE, 1: t(2), 0: t(1)})
    weights = EulerWeights(q=[0, Fraction(1, 3)], r=[0, 0], d=Fraction(1, 3))
    printed = PrintedSolution(
        F=t(1, 2) * t(2) / 2 - t(2, 4) / 72,
        Omega=OpenPotential(
            _laurent(AFFINE, {4: CoefElement.const(Fraction(1, 4)), 2: t(2) / 2, 1: t(1)}),
            correction=t(2, 2) / 6,
        ),
    )
    return CatalogEntry(
        name="h0_2",
        description="lam = p^3 + t2*p + t1",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(2), weights, name="h0_2"),
        calibration=Calibration(F_scale=Fraction(3)),
        printed_solution=printed,
        euler_weights=weights,
    )


def _h0_n(n: int) -> CatalogEntry:
    lam = flat_polynomial_family(n)
    weights = euler_weights_from_degrees(lam, n)
    entry = CatalogEntry(
        name="h0_n",
        description=f"lam = p^{n + 1} + ... in flat coordinates",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(n), weights, name=f"h0_n(n={n})"),
        euler_weights=weights,
        parameters={"n": n},
    )
    logger.debug(f"h0_n(n={n}): lam = {lam.render()}")
    return entry


def _h0_n_0(n: int) -> CatalogEntry:
    lam = flat_polynomial_family(n, with_pole=True)
    weights = euler_weights_from_degrees(lam, n + 1)
    return CatalogEntry(
        name="h0_n_0",
        description=f"lam = p^{n} + ... + t{n + 1}/p in flat coordinates",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(n + 1), weights, name=f"h0_n_0(n={n})"),
        euler_weights=weights,
        parameters={"n": n},
    )


def _trig1() -> CatalogEntry:
    e = CoefElement.exp({2: Fraction(1, 2)})
    # t1 - 2 exp(t2/2) cos p with z = exp(I p)
    lam = _laurent(EXP_IMAG, {1: -e, 0: t(1), -1: -e})
    weights = EulerWeights(q=[0, 1], r=[0, 2], d=1)
    printed = PrintedSolution(
        F=t(1, 2) * t(2) / 2 + CoefElement.exp({2: 1}),
        # -2 exp(t2/2) sin p = I exp(t2/2) (z - 1/z)
        Omega=OpenPotential(_laurent(EXP_IMAG, {1: I * e, -1: -I * e}), log_coefficient=t(1)),
    )
    return CatalogEntry(
        name="trig1",
        description="lam = t1 - 2*exp(t2/2)*cos(p), chart z = exp(I*p)",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(2), weights, name="trig1"),
        calibration=Calibration(F_scale=Fraction(-1)),
        printed_solution=printed,
        euler_weights=weights,
    )


def _trig2() -> CatalogEntry:
    e3 = CoefElement.exp({3: 1})
    lam = _laurent(EXP_REAL, {2: ONE, 1: SQRT2 * t(2), 0: t(1), -1: SQRT2 * e3 / 2})
    weights = EulerWeights(q=[0, Fraction(1, 2), 1], r=[0, 0, Fraction(3, 2)], d=1)
    printed = PrintedSolution(
        F=t(1, 2) * t(2) / 2 + t(2, 2) * t(1) / 2 - t(2, 4) / 24 + t(2) * e3,
        Omega=OpenPotential(
            _laurent(EXP_REAL, {2: CoefElement.const(Fraction(1, 2)), 1: SQRT2 * t(2), -1: -SQRT2 * e3 / 2}),
            log_coefficient=t(1),
            correction=t(2, 2) / 2,
        ),
        notes=[
            "the printed F carries (t1)^2*t2/2 where the residue formulas give (t1)^2*t3/2",
            "the metric of the printed F is degenerate; the derived F is authoritative",
        ],
    )
    return CatalogEntry(
        name="trig2",
        description="lam = exp(2p) + sqrt2*t2*exp(p) + t1 + exp(t3 - p)/sqrt2, chart z = exp(p)",
        mode="exact",
        spec=SuperpotentialSpec(lam, _names(3), weights, name="trig2"),
        printed_solution=printed,
        euler_weights=weights,
    )


def _h1_1() -> CatalogEntry:
    printed = PrintedSolution(
        F_text="(t1)^2*t3/2 + t1*(t2)^2/2 - I*pi/48*E2(t3)",
        Omega_text="t1*p + (t2)^2*d/dp log theta1(p, t3)",
        notes=[
            "verified pair: lam = t1 + (pi*I/4)*(t2)^2*d^2/dp^2 log theta1(p, t3)",
            "verified F = (t1)^2*t3/2 + t1*(t2)^2/2 - (pi*I/48)*(t2)^4*E2(t3)",
            "verified Omega = t1*p + (pi*I/4)*(t2)^2*d/dp log theta1(p, t3)",
        ],
    )
    weights = EulerWeights(q=[0, Fraction(1, 2), 1], r=[0, 0, 0], d=1)
    return CatalogEntry(
        name="h1_1",
        description="genus-one family lam = t1 + (pi*I/4)*(t2)^2*d^2/dp^2 log theta1(p, t3)",
        mode="numeric",
        spec=None,
        printed_solution=printed,
        euler_weights=weights,
    )


_REGISTRY: Dict[str, Tuple[int, str, Callable[..., CatalogEntry]]] = {
    "h0_1": (0, "exact", _h0_1),
    "h0_2": (0, "exact", _h0_2),
    "h0_n": (1, "exact", _h0_n),
    "h0_n_0": (1, "exact", _h0_n_0),
    "trig1": (0, "exact", _trig1),
    "trig2": (0, "exact", _trig2),
    "h1_1": (0, "numeric", _h1_1),
}

_DESCRIPTIONS = {
    "h0_1": "p^2 + t1",
    "h0_2": "p^3 + t2*p + t1",
    "h0_n": "polynomial p^(n+1) + ..., n >= 1",
    "h0_n_0": "p^n + ... + t(n+1)/p, n >= 1",
    "trig1": "t1 - 2*exp(t2/2)*cos(p)",
    "trig2": "exp(2p) + sqrt2*t2*exp(p) + t1 + exp(t3 - p)/sqrt2",
    "h1_1": "genus one, theta-function superpotential (numeric)",
}


def get(name: str, n: Optional[int] = None) -> CatalogEntry:
    """
    Catalog entry by name.

    Args:
        name: one of h0_1, h0_2, h0_n, h0_n_0, trig1, trig2, h1_1
        n: family parameter for h0_n and h0_n_0

    Returns:
        fully populated CatalogEntry
    """
    if name not in _REGISTRY:
        raise CatalogError(f"Unknown catalog family {name!r}; known: {', '.join(sorted(_REGISTRY))}")
    arity, _, builder = _REGISTRY[name]
    if arity == 0:
        if n is not None:
            raise CatalogError(f"{name} takes no parameter")
        return builder()
    if n is None:
        raise CatalogError(f"{name} needs the parameter n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise CatalogError(f"{name}: n must be an integer >= 1, got {n!r}")
    return builder(n)


def list_entries() -> List[CatalogListing]:
    return [
        CatalogListing(name=name, mode=mode, arity=arity, description=_DESCRIPTIONS[name])
        for name, (arity, mode, _) in _REGISTRY.items()
    ]


def parse_name(text: str) -> Tuple[str, Optional[int]]:
    """'h0_n(3)', 'h0_n:3' or 'h0_n(n=3)' -> ('h0_n', 3)"""
    text = text.strip()
    for open_, close in (("(", ")"), (":", "")):
        if open_ in text:
            base, _, rest = text.partition(open_)
            rest = rest[: -len(close)] if close and rest.endswith(close) else rest
            rest = rest.split("=", 1)[-1].strip()
            try:
                return base.strip(), int(rest)
            except ValueError as e:
                raise CatalogError(f"invalid family parameter in {text!r}") from e
    return text, None


def compare_with_printed(
    entry: CatalogEntry, F: CoefElement, omega: OpenPotential, apply_calibration: bool = True
) -> List[CalibrationComparison]:
    """Derived (F, Omega) transported by the calibration map against the printed pair"""
    printed = entry.printed_solution
    if printed is None or printed.F is None:
        return []
    calibration = entry.calibration if apply_calibration else IDENTITY
    names = entry.spec.names() if entry.spec else None
    F_t = calibration.transport_F(F)
    omega_t = calibration.transport_Omega(omega)
    note = "; ".join(printed.notes) or None
    out = []
    difference = F_t - printed.F
    out.append(
        CalibrationComparison(
            target="F",
            printed=printed.F.render(names),
            transported=F_t.render(names),
            matches=difference.is_zero(),
            difference=None if difference.is_zero() else difference.render(names),
            note=note,
        )
    )
    if printed.Omega is not None:
        matches = omega_t == printed.Omega
        diff_text = None
        if not matches:
            diff = OpenPotential(
                omega_t.laurent - printed.Omega.laurent,
                omega_t.log_coefficient - printed.Omega.log_coefficient,
                omega_t.correction - printed.Omega.correction,
            )
            diff_text = diff.render(names)
        out.append(
            CalibrationComparison(
                target="Omega",
                printed=printed.Omega.render_human(names),
                transported=omega_t.render_human(names),
                matches=matches,
                difference=diff_text,
            )
        )
    return out


def describe(entry: CatalogEntry) -> Dict[str, object]:
    """JSON description of one entry"""
    out: Dict[str, object] = {
        "name": entry.label(),
        "description": entry.description,
        "mode": entry.mode,
        "calibration": entry.calibration.describe(),
    }
    if entry.spec is not None:
        names = entry.spec.names()
        out["chart"] = entry.spec.chart.describe()
        out["variables"] = entry.spec.varnames
        out["lambda"] = entry.spec.lam.render(names)
        out["lambda_human"] = entry.spec.lam.render_human(names)
    if entry.euler_weights is not None:
        out["euler_weights"] = entry.euler_weights.as_dict()
    printed = entry.printed_solution
    if printed is not None:
        names = entry.spec.names() if entry.spec else None
        out["printed"] = {
            "F": printed.F.render(names) if printed.F is not None else printed.F_text,
            "Omega": printed.Omega.render_human(names) if printed.Omega is not None else printed.Omega_text,
            "notes": printed.notes,
        }
    return out
