"""
Stima e verifica delle costanti di Waldschmidt: successioni alpha(I^(t))/t,
intervalli (limite di Chudnovsky, minimo dei rapporti), criterio di
stabilizzazione e forme chiuse del catalogo.

Il motore non calcola mai il limite: produce limitazioni, evidenze di
stabilizzazione e i valori del catalogo, ciascuno etichettato come tale.
"""
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.cache_utils import AlphaCache
from src.exact_algebra import format_rational
from src.linear_systems import (
    DEFAULT_POLICY,
    AlphaValue,
    NotFoundBelowCap,
    RankPolicy,
    alpha_symbolic,
    default_degree_cap,
    is_nonempty,
)
from src.plane_geometry import (
    CurveRecipe,
    FatPointScheme,
    KConfigType,
    KConfiguration,
    ProjPoint,
    multiplicity_at,
    support_hash,
)
from src.table_catalogue import match_row

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphaEntry:
    t: int
    alpha: AlphaValue
    ratio: Optional[Fraction]

    @property
    def found(self) -> bool:
        return isinstance(self.alpha, int)


def wc_sequence(points: Sequence[ProjPoint], t_max: int, degree_cap: Optional[int] = None,
                policy: RankPolicy = DEFAULT_POLICY, cache: Optional[AlphaCache] = None) -> List[AlphaEntry]:
    """
    alpha(I^(t)) per t = 1..t_max. `degree_cap` limita alpha(I); per t si usa
    t·degree_cap, sufficiente per subadditività.
    """
    if t_max < 1:
        raise ValueError("t_max deve essere >= 1")
    base_cap = degree_cap if degree_cap is not None else default_degree_cap(FatPointScheme.uniform(points, 1))
    entries = []
    for t in range(1, t_max + 1):
        value = alpha_symbolic(points, t, t * base_cap, policy, cache=cache)
        ratio = Fraction(value, t) if isinstance(value, int) else None
        entries.append(AlphaEntry(t, value, ratio))
    return entries


def chudnovsky_lower_bound(points: Sequence[ProjPoint], policy: RankPolicy = DEFAULT_POLICY,
                           cache: Optional[AlphaCache] = None) -> Fraction:
    """(alpha(I_X) + 1) / 2."""
    if not points:
        raise ValueError("Insieme di punti vuoto")
    value = alpha_symbolic(points, 1, policy=policy, cache=cache)
    if isinstance(value, NotFoundBelowCap):
        raise RuntimeError("alpha(I_X) oltre il limite predefinito: impossibile")
    return Fraction(value + 1, 2)


def chudnovsky_holds(lower: Fraction, entries: Sequence[AlphaEntry]) -> bool:
    return all(e.ratio >= lower for e in entries if e.ratio is not None)


def subadditivity_holds(entries: Sequence[AlphaEntry]) -> bool:
    """alpha(I^(ab)) <= a·alpha(I^(b)) per ogni coppia presente."""
    by_t = {e.t: e.alpha for e in entries if e.found}
    for t, value in by_t.items():
        for b, base in by_t.items():
            if t % b == 0 and value > (t // b) * base:
                return False
    return True


@dataclass(frozen=True)
class StabilizationVerdict:
    m: int
    target_degree: int
    empty_below: bool
    nonempty_at: bool
    nonempty_certified: bool
    witness: str
    passed: bool


@dataclass(frozen=True)
class StabilizationReport:
    mu: int
    d: int
    m_max: int
    verdicts: Tuple[StabilizationVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def implied_value(self) -> Optional[Fraction]:
        return Fraction(self.d, self.mu) if self.passed else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu": self.mu,
            "d": self.d,
            "m_max": self.m_max,
            "passed": self.passed,
            "implied_value": format_rational(self.implied_value) if self.passed else None,
            "status": "consistent with the limit, not a proof",
            "verdicts": [asdict(v) for v in self.verdicts],
        }


def witness_covers(recipe: CurveRecipe, points: Sequence[ProjPoint], mult: int, degree: int) -> bool:
    return recipe.declared_degree == degree and all(multiplicity_at(recipe, p) >= mult for p in points)


def verify_stabilization(points: Sequence[ProjPoint], mu: int, d: int, m_max: int,
                         witness: Optional[CurveRecipe] = None, policy: RankPolicy = DEFAULT_POLICY,
                         cache: Optional[AlphaCache] = None) -> StabilizationReport:
    """
    Per m = 1..m_max verifica alpha((m·mu)X) == m·d: [I]_{md-1} vuoto e [I]_{md}
    non vuoto. Con una ricetta F, m·F è il testimone esatto della non vuotezza.
    """
    if min(mu, d, m_max) < 1:
        raise ValueError("mu, d e m_max devono essere >= 1")
    verdicts = []
    key = support_hash(points)
    for m in range(1, m_max + 1):
        scheme = FatPointScheme.uniform(points, m * mu)
        target = m * d
        nonempty_below, _ = is_nonempty(scheme, target - 1, policy)
        if witness is not None and witness_covers(witness.scaled(m), points, m * mu, target):
            nonempty, certified, how = True, True, "recipe"
        else:
            nonempty, certified = is_nonempty(scheme, target, policy)
            how = "rank"
        passed = (not nonempty_below) and nonempty
        verdicts.append(StabilizationVerdict(m, target, not nonempty_below, nonempty, certified, how, passed))
        logger.info("Stabilizzazione m=%d (mu=%d, d=%d): %s", m, mu, d, "OK" if passed else "FALLITA")
        if passed and certified and cache is not None:
            cache.put(key, m * mu, target)
    return StabilizationReport(mu, d, m_max, tuple(verdicts))


@dataclass(frozen=True)
class Bracket:
    lower: Fraction
    upper: Optional[Fraction]
    upper_t: Optional[int]
    entries: Tuple[AlphaEntry, ...]

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value and (self.upper is None or value <= self.upper)


def bracket(points: Sequence[ProjPoint], t_list: Sequence[int], degree_cap: Optional[int] = None,
            policy: RankPolicy = DEFAULT_POLICY, cache: Optional[AlphaCache] = None,
            hints: Optional[Dict[int, int]] = None) -> Bracket:
    """
    (limite inferiore di Chudnovsky, minimo dei rapporti alpha(I^(t))/t su t_list).
    `hints` associa a t un grado candidato per alpha (solo accelerazione).
    """
    if not t_list:
        raise ValueError("t_list vuota")
    lower = chudnovsky_lower_bound(points, policy, cache)
    hints = hints or {}
    entries = []
    for t in sorted(set(t_list)):
        cap = degree_cap * t if degree_cap is not None else None
        value = alpha_symbolic(points, t, cap, policy, hint=hints.get(t), cache=cache)
        entries.append(AlphaEntry(t, value, Fraction(value, t) if isinstance(value, int) else None))
    found = [e for e in entries if e.ratio is not None]
    best = min(found, key=lambda e: (e.ratio, e.t), default=None)
    return Bracket(lower, best.ratio if best else None, best.t if best else None, tuple(entries))


@dataclass(frozen=True)
class ClosedForm:
    """Valore del catalogo: razionale, intervallo o sconosciuto."""
    value: Optional[Fraction] = None
    interval: Optional[Tuple[Fraction, Fraction]] = None
    row_key: Optional[str] = None
    applies_to_any_configuration: bool = False

    @property
    def is_unknown(self) -> bool:
        return self.value is None and self.interval is None

    def to_dict(self) -> Dict[str, Any]:
        if self.value is not None:
            body: Dict[str, Any] = {"kind": "value", "value": format_rational(self.value)}
        elif self.interval is not None:
            body = {"kind": "interval", "interval": [format_rational(x) for x in self.interval]}
        else:
            body = {"kind": "unknown"}
        body["row"] = self.row_key
        body["applies_to"] = "any k-configuration" if self.applies_to_any_configuration else "standard"
        return body


UNKNOWN = ClosedForm()


def closed_form(t: KConfigType) -> ClosedForm:
    """Forma chiusa del catalogo per il tipo; d1 >= s vale per ogni k-configurazione."""
    row = match_row(t)
    if row is not None:
        value = row.value(t)
        if isinstance(value, tuple):
            return ClosedForm(interval=value, row_key=row.key)
        return ClosedForm(value=value, row_key=row.key, applies_to_any_configuration=row.any_configuration)
    if t.degrees[0] >= t.length:
        return ClosedForm(value=Fraction(t.length), row_key="disjoint-lines", applies_to_any_configuration=True)
    return UNKNOWN


@dataclass
class WaldschmidtReport:
    seq: List[AlphaEntry]
    upper_bound: Optional[Fraction]
    lower_bound: Fraction
    closed_form: Optional[ClosedForm] = None
    stabilization: Optional[StabilizationReport] = None
    notes: List[str] = field(default_factory=list)

    def is_consistent(self) -> bool:
        if not (chudnovsky_holds(self.lower_bound, self.seq) and subadditivity_holds(self.seq)):
            return False
        if self.upper_bound is not None and self.lower_bound > self.upper_bound:
            return False
        if self.closed_form is not None and self.closed_form.value is not None and self.upper_bound is not None:
            return self.lower_bound <= self.closed_form.value <= self.upper_bound
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequence": [
                {
                    "t": e.t,
                    "alpha": e.alpha if e.found else None,
                    "ratio": format_rational(e.ratio) if e.ratio is not None else None,
                    "status": "computed" if e.found else f"not found below degree {e.alpha.cap}",
                }
                for e in self.seq
            ],
            "upper_bound": {
                "value": format_rational(self.upper_bound) if self.upper_bound is not None else None,
                "status": "upper bound: minimum computed ratio",
            },
            "lower_bound": {
                "value": format_rational(self.lower_bound),
                "status": "lower bound: Chudnovsky (alpha+1)/2",
            },
            "closed_form": self.closed_form.to_dict() if self.closed_form else None,
            "stabilization": self.stabilization.to_dict() if self.stabilization else None,
            "notes": list(self.notes),
        }


def build_report(points: Sequence[ProjPoint], t_max: int, ktype: Optional[KConfigType] = None,
                 m_max: int = 0, degree_cap: Optional[int] = None, policy: RankPolicy = DEFAULT_POLICY,
                 cache: Optional[AlphaCache] = None) -> WaldschmidtReport:
    """Rapporto completo; con ktype aggiunge forma chiusa e, se m_max > 0, stabilizzazione."""
    seq = wc_sequence(points, t_max, degree_cap, policy, cache)
    lower = chudnovsky_lower_bound(points, policy, cache)
    ratios = [e.ratio for e in seq if e.ratio is not None]
    report = WaldschmidtReport(seq, min(ratios) if ratios else None, lower)
    if any(not e.found for e in seq):
        report.notes.append("some alpha values not found below the degree cap")
    if ktype is not None:
        report.closed_form = closed_form(ktype)
        row = match_row(ktype)
        if m_max > 0 and row is not None and row.pair is not None:
            mu, d = row.pair(ktype)
            witness = row.recipe(ktype) if row.recipe is not None else None
            report.stabilization = verify_stabilization(points, mu, d, m_max, witness, policy, cache)
        elif m_max > 0:
            report.notes.append("stabilization skipped: no catalogue pair for this type")
    if not chudnovsky_holds(lower, seq):
        report.notes.append("Chudnovsky inequality violated by computed data")
        logger.error("Disuguaglianza di Chudnovsky violata: %s", [e.ratio for e in seq])
    if not subadditivity_holds(seq):
        report.notes.append("subadditivity alpha(I^(ab)) <= a·alpha(I^(b)) violated by computed data")
        logger.error("Subadditività violata: %s", [(e.t, e.alpha) for e in seq if e.found])
    return report


def compare_configurations(first: KConfiguration, second: KConfiguration, t_max: int,
                           policy: RankPolicy = DEFAULT_POLICY,
                           cache: Optional[AlphaCache] = None) -> Dict[str, Any]:
    """Successioni e intervalli di due configurazioni dello stesso tipo, affiancati."""
    if first.type != second.type:
        raise ValueError("Le configurazioni hanno tipi diversi")
    out: Dict[str, Any] = {"type": str(first.type), "configurations": []}
    sequences = []
    for name, config in (("first", first), ("second", second)):
        report = build_report(config.points, t_max, policy=policy, cache=cache)
        sequences.append([e.alpha for e in report.seq])
        out["configurations"].append({"name": name, "points": [p.to_json() for p in config.points],
                                      **report.to_dict()})
    out["sequences_differ"] = sequences[0] != sequences[1]
    return out
