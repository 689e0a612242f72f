"""
Certificati di vuotezza per [I_Z]_d tramite riduzione per componenti fisse.

Ogni passo toglie una componente forzata (formula del ceiling per le rette,
eccesso di intersezione di Bézout per le curve del nucleo) e abbassa le
molteplicità dello schema residuo. Il certificato si rigioca e si verifica
in modo indipendente.
"""
import hashlib
import json
import logging
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.linear_systems import (
    DEFAULT_POLICY,
    LinearSystemQuery,
    RankPolicy,
    dim_linear_system,
    lines_through_pairs,
)
from src.plane_geometry import (
    Curve,
    CurveComponent,
    FatPointScheme,
    Line,
    PolyCurve,
    scheme_from_json,
)

logger = logging.getLogger(__name__)


class TerminalReason(str, Enum):
    DEGREE_EXHAUSTED = "DegreeExhausted"
    POINT_EXCEEDS_DEGREE = "PointExceedsDegree"
    RESIDUAL_EMPTY_BY_COUNT = "ResidualEmptyByCount"


@dataclass(frozen=True)
class LineExcess:
    points_on_component: int
    sum_mults: int
    degree: int


@dataclass(frozen=True)
class BezoutExcess:
    intersection_count: int
    degree_product: int


Justification = Union[LineExcess, BezoutExcess]


@dataclass(frozen=True)
class ReductionStep:
    component: CurveComponent
    forced_multiplicity: int
    justification: Justification

    @property
    def curve(self) -> Curve:
        return self.component.curve


@dataclass(frozen=True)
class ReductionCertificate:
    initial_scheme: FatPointScheme
    initial_degree: int
    steps: Tuple[ReductionStep, ...]
    terminal_reason: TerminalReason
    final_scheme: FatPointScheme
    final_degree: int
    overflow_step: Optional[ReductionStep] = None


@dataclass(frozen=True)
class Inconclusive:
    """Nessuna componente forzata e nessun predicato terminale: traccia parziale."""
    initial_scheme: FatPointScheme
    initial_degree: int
    steps: Tuple[ReductionStep, ...]
    residual_scheme: FatPointScheme
    residual_degree: int


def mu_fixed_multiplicity(mults: Sequence[int], d: int) -> int:
    """max(0, ceil((m1 + ... + ms - d) / (s - 1))) per s >= 2 punti su una retta."""
    s = len(mults)
    if s < 2:
        raise ValueError("Servono almeno due punti sulla retta")
    excess = sum(mults) - d
    if excess <= 0:
        return 0
    return -(-excess // (s - 1))


def reduce_by_component(scheme: FatPointScheme, d: int, comp: Union[CurveComponent, Curve],
                        k: int) -> Tuple[FatPointScheme, int]:
    """Toglie k volte la componente: grado d - k·deg, molteplicità ridotte e troncate a 0."""
    curve = comp.curve if isinstance(comp, CurveComponent) else comp
    if k < 1:
        raise ValueError("k deve essere >= 1")
    if k * curve.degree > d:
        raise ValueError(f"Impossibile togliere {k} volte una curva di grado {curve.degree} dal grado {d}")
    residual = FatPointScheme.from_pairs([
        (p, max(0, m - k * curve.vanishing_order(p))) for p, m in scheme.supports
    ])
    return residual, d - k * curve.degree


def _line_step(scheme: FatPointScheme, d: int, line: Line, label: str = "") -> Optional[ReductionStep]:
    on_line = [m for p, m in scheme.supports if line.contains(p)]
    if len(on_line) < 2:
        return None
    forced = mu_fixed_multiplicity(on_line, d)
    if forced < 1:
        return None
    return ReductionStep(CurveComponent(line, forced, label or f"join {line}"), forced,
                         LineExcess(len(on_line), sum(on_line), d))


def bezout_fixed_check(scheme: FatPointScheme, d: int,
                       comp: Union[CurveComponent, Curve]) -> Optional[ReductionStep]:
    """
    Se sum(ord_P(C)·m_P) > deg(C)·d la curva (irriducibile) C è componente fissa:
    passo con molteplicità forzata 1.
    """
    curve = comp.curve if isinstance(comp, CurveComponent) else comp
    label = comp.label if isinstance(comp, CurveComponent) else ""
    intersection = sum(curve.vanishing_order(p) * m for p, m in scheme.supports)
    product = curve.degree * d
    if intersection <= product:
        return None
    return ReductionStep(CurveComponent(curve, 1, label), 1, BezoutExcess(intersection, product))


def _hint_step(scheme: FatPointScheme, d: int, hint: CurveComponent) -> Optional[ReductionStep]:
    if isinstance(hint.curve, Line):
        return _line_step(scheme, d, hint.curve, hint.label)
    return bezout_fixed_check(scheme, d, hint)


def _next_step(scheme: FatPointScheme, d: int, hints: Sequence[CurveComponent]) -> Optional[ReductionStep]:
    hinted = [s for s in (_hint_step(scheme, d, h) for h in hints) if s is not None]
    if hinted:
        # a parità di molteplicità vince l'ordine dei suggerimenti
        return max(enumerate(hinted), key=lambda item: (item[1].forced_multiplicity, -item[0]))[1]
    candidates = []
    for line in lines_through_pairs(scheme.points):
        step = _line_step(scheme, d, line)
        if step is not None:
            candidates.append(step)
    if not candidates:
        return None
    candidates.sort(key=lambda s: (-s.forced_multiplicity, s.curve.sort_key()))
    return candidates[0]


def emptiness_certificate(scheme: FatPointScheme, d: int, hints: Sequence[CurveComponent] = (),
                          policy: RankPolicy = DEFAULT_POLICY,
                          max_residual_entries: Optional[int] = None) -> Union[ReductionCertificate, Inconclusive]:
    """
    Riduzione greedy fino a un predicato terminale:
    punto con molteplicità > grado, componente forzata oltre il grado residuo,
    oppure residuo vuoto per rango esatto. Altrimenti Inconclusive.

    Con `max_residual_entries` il controllo di rango finale viene saltato
    (risultato Inconclusive) se la matrice del residuo è più grande.
    """
    if d < 0:
        raise ValueError("Il grado deve essere >= 0")
    current, degree = scheme, d
    steps: List[ReductionStep] = []

    def finish(reason: TerminalReason, overflow: Optional[ReductionStep] = None) -> ReductionCertificate:
        logger.info("Certificato di vuotezza in grado %d: %d passi, %s", d, len(steps), reason.value)
        return ReductionCertificate(scheme, d, tuple(steps), reason, current, degree, overflow)

    while True:
        if any(m > degree for m in current.multiplicities):
            return finish(TerminalReason.POINT_EXCEEDS_DEGREE)
        step = _next_step(current, degree, hints)
        if step is not None:
            if step.forced_multiplicity * step.curve.degree > degree:
                return finish(TerminalReason.DEGREE_EXHAUSTED, step)
            logger.debug("Tolgo %d x %s (grado %d)", step.forced_multiplicity, step.component.label, degree)
            current, degree = reduce_by_component(current, degree, step.curve, step.forced_multiplicity)
            steps.append(step)
            continue
        too_large = (
            max_residual_entries is not None
            and current.total_conditions() * comb(degree + 2, 2) > max_residual_entries
        )
        if not current.is_empty() and not too_large:
            result = dim_linear_system(LinearSystemQuery(current, degree), policy)
            if result.dimension == 0 and result.certified:
                return finish(TerminalReason.RESIDUAL_EMPTY_BY_COUNT)
        logger.info("Riduzione inconcludente in grado %d dopo %d passi", d, len(steps))
        return Inconclusive(scheme, d, tuple(steps), current, degree)


def _justification_holds(scheme: FatPointScheme, degree: int, step: ReductionStep) -> bool:
    just = step.justification
    curve = step.curve
    if isinstance(just, LineExcess):
        if not isinstance(curve, Line):
            return False
        on_line = [m for p, m in scheme.supports if curve.contains(p)]
        if len(on_line) < 2:
            return False
        return (
            just.points_on_component == len(on_line)
            and just.sum_mults == sum(on_line)
            and just.degree == degree
            and step.forced_multiplicity >= 1
            and step.forced_multiplicity == mu_fixed_multiplicity(on_line, degree)
        )
    if isinstance(just, BezoutExcess):
        intersection = sum(curve.vanishing_order(p) * m for p, m in scheme.supports)
        product = curve.degree * degree
        return (
            just.intersection_count == intersection
            and just.degree_product == product
            and intersection > product
            and step.forced_multiplicity == 1
        )
    return False


def verify_certificate(c: ReductionCertificate, policy: RankPolicy = DEFAULT_POLICY) -> bool:
    """Rigioca ogni passo ricalcolando le giustificazioni e controlla il predicato terminale."""
    try:
        current, degree = c.initial_scheme, c.initial_degree
        for index, step in enumerate(c.steps):
            if not _justification_holds(current, degree, step):
                logger.warning("Passo %d: giustificazione non valida", index)
                return False
            if step.forced_multiplicity * step.curve.degree > degree:
                return False
            current, degree = reduce_by_component(current, degree, step.curve, step.forced_multiplicity)
            if degree < 0:
                return False
        if current.content_hash() != c.final_scheme.content_hash() or degree != c.final_degree:
            logger.warning("Stato finale diverso da quello dichiarato")
            return False

        if c.terminal_reason == TerminalReason.POINT_EXCEEDS_DEGREE:
            return any(m > degree for m in current.multiplicities)
        if c.terminal_reason == TerminalReason.DEGREE_EXHAUSTED:
            step = c.overflow_step
            return (
                step is not None
                and _justification_holds(current, degree, step)
                and step.forced_multiplicity * step.curve.degree > degree
            )
        if c.terminal_reason == TerminalReason.RESIDUAL_EMPTY_BY_COUNT:
            if current.is_empty():
                return False
            result = dim_linear_system(LinearSystemQuery(current, degree), policy)
            return result.dimension == 0 and result.certified
        return False
    except (ValueError, TypeError) as e:
        logger.warning("Certificato non rigiocabile: %s", e)
        return False


# ---------------------------------------------------------------------------
# Serializzazione
# ---------------------------------------------------------------------------

def _curve_to_dict(curve: Curve) -> Dict[str, Any]:
    if isinstance(curve, Line):
        return {"kind": "line", "coeffs": [str(a) for a in curve.coeffs]}
    return {"kind": "poly", "degree": curve.degree, "coefficients": curve.coefficients_glex()}


def _curve_from_dict(data: Dict[str, Any]) -> Curve:
    if data["kind"] == "line":
        return Line(tuple(data["coeffs"]))
    return PolyCurve.from_coefficients(int(data["degree"]), data["coefficients"])


def _step_to_dict(step: ReductionStep) -> Dict[str, Any]:
    just = step.justification
    if isinstance(just, LineExcess):
        jd = {"kind": "LineExcess", "points_on_component": just.points_on_component,
              "sum_mults": just.sum_mults, "degree": just.degree}
    else:
        jd = {"kind": "BezoutExcess", "intersection_count": just.intersection_count,
              "degree_product": just.degree_product}
    return {
        "component": _curve_to_dict(step.curve),
        "label": step.component.label,
        "forced_multiplicity": step.forced_multiplicity,
        "justification": jd,
    }


def _step_from_dict(data: Dict[str, Any]) -> ReductionStep:
    jd = data["justification"]
    if jd["kind"] == "LineExcess":
        just: Justification = LineExcess(int(jd["points_on_component"]), int(jd["sum_mults"]), int(jd["degree"]))
    elif jd["kind"] == "BezoutExcess":
        just = BezoutExcess(int(jd["intersection_count"]), int(jd["degree_product"]))
    else:
        raise ValueError(f"Giustificazione sconosciuta: {jd['kind']}")
    forced = int(data["forced_multiplicity"])
    return ReductionStep(CurveComponent(_curve_from_dict(data["component"]), forced, data.get("label", "")),
                         forced, just)


def certificate_to_dict(c: Union[ReductionCertificate, Inconclusive]) -> Dict[str, Any]:
    body: Dict[str, Any] = {
        "initial": {"scheme": c.initial_scheme.to_json(), "degree": c.initial_degree},
        "steps": [_step_to_dict(s) for s in c.steps],
    }
    if isinstance(c, Inconclusive):
        body["terminal_reason"] = "Inconclusive"
        body["residual"] = {"scheme": c.residual_scheme.to_json(), "degree": c.residual_degree}
        return body
    body["terminal_reason"] = c.terminal_reason.value
    body["final"] = {"scheme": c.final_scheme.to_json(), "degree": c.final_degree}
    body["overflow_step"] = _step_to_dict(c.overflow_step) if c.overflow_step else None
    return body


def certificate_from_dict(data: Dict[str, Any]) -> ReductionCertificate:
    if data.get("terminal_reason") == "Inconclusive":
        raise ValueError("Una traccia inconcludente non è un certificato")
    overflow = data.get("overflow_step")
    return ReductionCertificate(
        scheme_from_json(data["initial"]["scheme"]),
        int(data["initial"]["degree"]),
        tuple(_step_from_dict(s) for s in data["steps"]),
        TerminalReason(data["terminal_reason"]),
        scheme_from_json(data["final"]["scheme"]),
        int(data["final"]["degree"]),
        _step_from_dict(overflow) if overflow else None,
    )


def certificate_id(c: ReductionCertificate) -> str:
    payload = json.dumps(certificate_to_dict(c), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
