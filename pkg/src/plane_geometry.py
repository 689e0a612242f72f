"""
Geometria esatta del piano proiettivo: punti, rette, schemi di punti grassi,
k-configurazioni (standard e generiche) e curve-ricetta F usate come testimoni
di non vuotezza.
"""
import hashlib
import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

from src.exact_algebra import (
    ExactMatrix,
    Rational,
    format_rational,
    kernel_basis,
    to_rational,
)

logger = logging.getLogger(__name__)


class GeometryError(ValueError):
    """Dati geometrici non validi (punti nulli, punti coincidenti, ...)."""


class InvalidTypeError(GeometryError):
    """Tipo di k-configurazione non strettamente crescente o non positivo."""


class ConfigurationError(RuntimeError):
    """Costruzione di una configurazione fallita entro il budget di tentativi."""


class RecipeError(RuntimeError):
    """Curva-ricetta incoerente o nucleo di interpolazione non unidimensionale."""


def _normalize_triple(values: Sequence) -> Tuple[Rational, Rational, Rational]:
    if len(values) != 3:
        raise GeometryError(f"Attese 3 coordinate, ricevute {len(values)}")
    coords = [to_rational(v) for v in values]
    lead = next((c for c in coords if c != 0), None)
    if lead is None:
        raise GeometryError("La terna nulla non rappresenta un punto/retta")
    return tuple(to_rational(Fraction(c) / Fraction(lead)) for c in coords)


def _cross(u: Sequence, v: Sequence) -> Tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


@dataclass(frozen=True)
class ProjPoint:
    """Punto [x0:x1:x2] con coordinate razionali, normalizzato (prima coordinata non nulla = 1)."""
    coords: Tuple[Rational, Rational, Rational]

    def __post_init__(self):
        object.__setattr__(self, "coords", _normalize_triple(self.coords))

    @classmethod
    def of(cls, x0, x1, x2) -> "ProjPoint":
        return cls((x0, x1, x2))

    def chart(self) -> Tuple[int, Tuple[int, int]]:
        """Indice della coordinata pivot (= 1) e indici delle altre due."""
        k = next(i for i, c in enumerate(self.coords) if c != 0)
        return k, tuple(i for i in range(3) if i != k)

    def to_json(self) -> List[str]:
        return [_rational_str(c) for c in self.coords]

    @classmethod
    def from_json(cls, values: Sequence) -> "ProjPoint":
        return cls(tuple(values))

    def sort_key(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(c) for c in self.coords)

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True)
class Line:
    """Retta a0·x0 + a1·x1 + a2·x2 = 0, coefficienti normalizzati come per i punti."""
    coeffs: Tuple[Rational, Rational, Rational]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _normalize_triple(self.coeffs))

    @classmethod
    def of(cls, a0, a1, a2) -> "Line":
        return cls((a0, a1, a2))

    @property
    def degree(self) -> int:
        return 1

    def contains(self, point: ProjPoint) -> bool:
        return sum(a * x for a, x in zip(self.coeffs, point.coords)) == 0

    def vanishing_order(self, point: ProjPoint) -> int:
        return 1 if self.contains(point) else 0

    def integer_coeffs(self) -> Tuple[int, int, int]:
        scale = lcm(*(Fraction(a).denominator for a in self.coeffs))
        return tuple(int(a * scale) for a in self.coeffs)

    def to_sympy(self) -> sympy.Poly:
        x0, x1, x2 = sympy.symbols("x0 x1 x2")
        a0, a1, a2 = self.integer_coeffs()
        return sympy.Poly(a0 * x0 + a1 * x1 + a2 * x2, x0, x1, x2, domain="QQ")

    def sort_key(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(a) for a in self.coeffs)

    def __str__(self) -> str:
        terms = [f"{a}*x{i}" for i, a in enumerate(self.coeffs) if a != 0]
        return " + ".join(terms) + " = 0"


def line_through(p: ProjPoint, q: ProjPoint) -> Line:
    """Unica retta per due punti distinti (prodotto vettoriale delle coordinate)."""
    if p == q:
        raise GeometryError(f"Punti coincidenti: {p}")
    return Line(_cross(p.coords, q.coords))


def _rational_str(value: Rational) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else format_rational(value)


# ---------------------------------------------------------------------------
# Monomi e condizioni locali
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def monomials(degree: int) -> Tuple[Tuple[int, int, int], ...]:
    """Monomi di grado dato in ordine graded-lex (x0 > x1 > x2)."""
    if degree < 0:
        return ()
    return tuple(
        (e0, e1, degree - e0 - e1)
        for e0 in range(degree, -1, -1)
        for e1 in range(degree - e0, -1, -1)
    )


def _local_factor(exponent: int, order: int, powers: Dict[int, Rational]) -> Rational:
    # coefficiente di u^order in (base + u)^exponent
    if order > exponent:
        return 0
    return comb(exponent, order) * powers[exponent - order]


def vanishing_conditions(point: ProjPoint, multiplicity: int, degree: int) -> List[List[Rational]]:
    """
    Righe delle condizioni di annullamento di ordine `multiplicity` in `point`
    per forme di grado `degree`.

    Il punto è portato nell'origine della carta affine del suo pivot con un
    cambio di coordinate esatto; ogni riga è il coefficiente di u^i v^j (i+j < m)
    dello sviluppo locale. Nessuna divisione per fattoriali.
    """
    mons = monomials(degree)
    _, (i1, i2) = point.chart()
    a, b = point.coords[i1], point.coords[i2]
    a_pow = {n: a ** n for n in range(degree + 1)}
    b_pow = {n: b ** n for n in range(degree + 1)}
    rows = []
    for total in range(multiplicity):
        for i in range(total, -1, -1):
            j = total - i
            rows.append([
                _local_factor(e[i1], i, a_pow) * _local_factor(e[i2], j, b_pow)
                for e in mons
            ])
    return rows


def _local_expansion(terms: Sequence[Tuple[Tuple[int, int, int], int]], point: ProjPoint) -> Dict[Tuple[int, int], Fraction]:
    _, (i1, i2) = point.chart()
    a, b = point.coords[i1], point.coords[i2]
    local: Dict[Tuple[int, int], Fraction] = {}
    for exps, coeff in terms:
        e1, e2 = exps[i1], exps[i2]
        for i in range(e1 + 1):
            ci = comb(e1, i) * a ** (e1 - i)
            if ci == 0:
                continue
            for j in range(e2 + 1):
                cj = comb(e2, j) * b ** (e2 - j)
                if cj:
                    local[(i, j)] = local.get((i, j), 0) + coeff * ci * cj
    return local


@dataclass(frozen=True)
class PolyCurve:
    """
    Forma omogenea a coefficienti interi in forma canonica: contenuto 1,
    primo coefficiente non nullo (ordine graded-lex) positivo.
    """
    degree: int
    terms: Tuple[Tuple[Tuple[int, int, int], int], ...]

    def __post_init__(self):
        if not self.terms:
            raise GeometryError("Polinomio nullo")
        if any(sum(e) != self.degree for e, _ in self.terms):
            raise GeometryError("Polinomio non omogeneo")

    @classmethod
    def from_coefficients(cls, degree: int, coefficients: Sequence) -> "PolyCurve":
        """Costruisce la curva dai coefficienti in ordine graded-lex, riducendola a forma canonica."""
        mons = monomials(degree)
        if len(coefficients) != len(mons):
            raise GeometryError(f"Attesi {len(mons)} coefficienti per il grado {degree}")
        values = [Fraction(to_rational(c)) for c in coefficients]
        if all(v == 0 for v in values):
            raise GeometryError("Polinomio nullo")
        scale = lcm(*(v.denominator for v in values))
        ints = [int(v * scale) for v in values]
        content = 0
        for x in ints:
            content = gcd(content, x)
        lead = next(x for x in ints if x != 0)
        sign = 1 if lead > 0 else -1
        terms = tuple((e, sign * x // content) for e, x in zip(mons, ints) if x != 0)
        return cls(degree, terms)

    def coefficients_glex(self) -> List[int]:
        lookup = dict(self.terms)
        return [lookup.get(e, 0) for e in monomials(self.degree)]

    def vanishing_order(self, point: ProjPoint) -> int:
        """Ordine minimo non nullo dello sviluppo locale nel punto (0 se la curva non passa)."""
        local = _local_expansion(self.terms, point)
        return min(i + j for (i, j), v in local.items() if v != 0)

    def evaluate(self, point: ProjPoint) -> Rational:
        return to_rational(sum(
            Fraction(c) * Fraction(point.coords[0]) ** e[0] * Fraction(point.coords[1]) ** e[1]
            * Fraction(point.coords[2]) ** e[2]
            for e, c in self.terms
        ))

    def to_sympy(self) -> sympy.Poly:
        x0, x1, x2 = sympy.symbols("x0 x1 x2")
        expr = sum(c * x0 ** e[0] * x1 ** e[1] * x2 ** e[2] for e, c in self.terms)
        return sympy.Poly(expr, x0, x1, x2, domain="QQ")

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


Curve = Union[Line, PolyCurve]


def curve_from_kernel_vector(degree: int, vector: Sequence) -> Curve:
    """Vettore di nucleo (ordine graded-lex) -> Line se di grado 1, altrimenti PolyCurve."""
    if degree == 1:
        return Line(tuple(vector))
    return PolyCurve.from_coefficients(degree, vector)


@dataclass(frozen=True)
class CurveComponent:
    curve: Curve
    multiplicity: int
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.multiplicity, int) or self.multiplicity < 1:
            raise GeometryError(f"Molteplicità di componente non valida: {self.multiplicity}")
        if isinstance(self.curve, PolyCurve) and self.curve.degree < 2:
            raise GeometryError("Le componenti polinomiali hanno grado >= 2; usare Line per il grado 1")

    @property
    def degree(self) -> int:
        return self.curve.degree

    def vanishing_order(self, point: ProjPoint) -> int:
        return self.curve.vanishing_order(point)

    def with_multiplicity(self, multiplicity: int) -> "CurveComponent":
        return CurveComponent(self.curve, multiplicity, self.label)


@dataclass(frozen=True)
class CurveRecipe:
    """Combinazione formale di componenti con grado e molteplicità dichiarati."""
    components: Tuple[CurveComponent, ...]
    declared_degree: int
    declared_point_multiplicity: int
    exact: bool
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.computed_degree() != self.declared_degree:
            raise RecipeError(
                f"Grado dichiarato {self.declared_degree} diverso da quello calcolato {self.computed_degree()}"
            )
        if self.declared_point_multiplicity < 1:
            raise RecipeError("La molteplicità dichiarata deve essere positiva")

    def computed_degree(self) -> int:
        return sum(c.multiplicity * c.degree for c in self.components)

    def scaled(self, m: int) -> "CurveRecipe":
        """La curva m·F."""
        return CurveRecipe(
            tuple(c.with_multiplicity(c.multiplicity * m) for c in self.components),
            self.declared_degree * m,
            self.declared_point_multiplicity * m,
            self.exact,
            self.label,
        )


def multiplicity_at(recipe: CurveRecipe, point: ProjPoint) -> int:
    """Somma delle molteplicità delle componenti pesate per l'ordine di annullamento nel punto."""
    return sum(c.multiplicity * c.vanishing_order(point) for c in recipe.components)


@dataclass(frozen=True)
class RecipeAudit:
    degree_ok: bool
    multiplicities: Tuple[int, ...]
    exact: bool
    ok: bool


def audit_recipe(recipe: CurveRecipe, points: Sequence[ProjPoint]) -> RecipeAudit:
    """Verifica identità del grado e molteplicità punto per punto (== se esatta, >= altrimenti)."""
    mults = tuple(multiplicity_at(recipe, p) for p in points)
    target = recipe.declared_point_multiplicity
    if recipe.exact:
        pointwise = all(m == target for m in mults)
    else:
        pointwise = all(m >= target for m in mults)
    degree_ok = recipe.computed_degree() == recipe.declared_degree
    return RecipeAudit(degree_ok, mults, recipe.exact, degree_ok and pointwise)


# ---------------------------------------------------------------------------
# Schemi di punti grassi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FatPointScheme:
    """Lo schema m1·P1 + ... + ms·Ps."""
    supports: Tuple[Tuple[ProjPoint, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "supports", tuple((p, m) for p, m in self.supports))
        seen = set()
        for p, m in self.supports:
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise GeometryError(f"Molteplicità non valida per {p}: {m}")
            if p in seen:
                raise GeometryError(f"Punto ripetuto nello schema: {p}")
            seen.add(p)

    @classmethod
    def uniform(cls, points: Sequence[ProjPoint], t: int) -> "FatPointScheme":
        """Lo schema tX."""
        if t < 1:
            return cls(())
        return cls(tuple((p, t) for p in points))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[ProjPoint, int]]) -> "FatPointScheme":
        """Come il costruttore, ma scarta le coppie di molteplicità 0."""
        return cls(tuple((p, m) for p, m in pairs if m > 0))

    @property
    def points(self) -> List[ProjPoint]:
        return [p for p, _ in self.supports]

    @property
    def multiplicities(self) -> List[int]:
        return [m for _, m in self.supports]

    def multiplicity(self, point: ProjPoint) -> int:
        return next((m for p, m in self.supports if p == point), 0)

    def max_multiplicity(self) -> int:
        return max(self.multiplicities, default=0)

    def total_conditions(self) -> int:
        return sum(m * (m + 1) // 2 for m in self.multiplicities)

    def is_empty(self) -> bool:
        return not self.supports

    def canonical(self) -> List[Tuple[List[str], int]]:
        return sorted(((p.to_json(), m) for p, m in self.supports),
                      key=lambda item: tuple(Fraction(c) for c in item[0]))

    def content_hash(self) -> str:
        payload = json.dumps(self.canonical(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_json(self) -> Dict[str, list]:
        return {
            "points": [p.to_json() for p in self.points],
            "multiplicities": self.multiplicities,
        }


def support_hash(points: Sequence[ProjPoint]) -> str:
    """Hash SHA-256 del JSON canonico dei punti (indipendente dall'ordine)."""
    canonical = sorted((p.to_json() for p in points), key=lambda c: tuple(Fraction(x) for x in c))
    payload = json.dumps(canonical, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def scheme_to_json(scheme: FatPointScheme) -> str:
    return json.dumps(scheme.to_json(), indent=2)


def scheme_from_json(document: Union[str, Dict]) -> FatPointScheme:
    """
    Legge {"points": [[x0,x1,x2], ...], "multiplicities": [...]}.
    Coordinate intere o stringhe "num/den"; i float sono rifiutati.
    """
    data = json.loads(document) if isinstance(document, str) else document
    if not isinstance(data, dict) or "points" not in data:
        raise GeometryError("Documento schema privo del campo 'points'")
    points = data["points"]
    mults = data.get("multiplicities", [1] * len(points))
    if not isinstance(points, list) or not isinstance(mults, list) or len(points) != len(mults):
        raise GeometryError("'points' e 'multiplicities' devono essere liste della stessa lunghezza")
    return FatPointScheme(tuple((ProjPoint.from_json(p), m) for p, m in zip(points, mults)))


# ---------------------------------------------------------------------------
# k-configurazioni
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KConfigType:
    degrees: Tuple[int, ...]

    def __post_init__(self):
        degrees = tuple(self.degrees)
        object.__setattr__(self, "degrees", degrees)
        if not degrees:
            raise InvalidTypeError("Tipo vuoto")
        if any(not isinstance(d, int) or isinstance(d, bool) for d in degrees):
            raise InvalidTypeError(f"Tipo con valori non interi: {degrees}")
        if degrees[0] < 1 or any(a >= b for a, b in zip(degrees, degrees[1:])):
            raise InvalidTypeError(f"Il tipo deve essere strettamente crescente e positivo: {degrees}")

    @classmethod
    def of(cls, *degrees: int) -> "KConfigType":
        return cls(tuple(degrees))

    @classmethod
    def parse(cls, text: str) -> "KConfigType":
        """Interpreta "1,2,6" (parentesi opzionali)."""
        cleaned = text.strip().strip("()")
        try:
            return cls(tuple(int(x) for x in cleaned.split(",") if x.strip()))
        except ValueError as e:
            if isinstance(e, InvalidTypeError):
                raise
            raise InvalidTypeError(f"Tipo non valido: {text!r}") from e

    @property
    def length(self) -> int:
        return len(self.degrees)

    @property
    def size(self) -> int:
        return sum(self.degrees)

    def __str__(self) -> str:
        return "(" + ",".join(str(d) for d in self.degrees) + ")"


@dataclass(frozen=True)
class KConfiguration:
    type: KConfigType
    parts: Tuple[Tuple[ProjPoint, ...], ...]
    lines: Tuple[Line, ...]

    @property
    def points(self) -> List[ProjPoint]:
        return [p for part in self.parts for p in part]


def standard_line(s: int, i: int) -> Line:
    """Retta L_i della configurazione standard: x2 = (s - i)·x0."""
    return Line.of(-(s - i), 0, 1)


def standard_k_configuration(t: KConfigType) -> KConfiguration:
    s = t.length
    parts = tuple(
        tuple(ProjPoint.of(1, j, s - i) for j in range(d))
        for i, d in enumerate(t.degrees, start=1)
    )
    lines = tuple(standard_line(s, i) for i in range(1, s + 1))
    return KConfiguration(t, parts, lines)


def standard_k_config(t: KConfigType) -> List[ProjPoint]:
    """Punti [1:j:s-i] per i = 1..s, j = 0..d_i-1."""
    return standard_k_configuration(t).points


def validate_k_configuration(parts: Sequence[Sequence[ProjPoint]], lines: Sequence[Line],
                             t: KConfigType) -> List[str]:
    """Restituisce l'elenco delle violazioni della definizione di k-configurazione (vuoto se valida)."""
    violations = []
    if len(parts) != t.length or len(lines) != t.length:
        violations.append(f"attese {t.length} parti e rette, trovate {len(parts)} e {len(lines)}")
        return violations
    if len(set(lines)) != len(lines):
        violations.append("rette non distinte")
    all_points = [p for part in parts for p in part]
    if len(set(all_points)) != len(all_points):
        violations.append("punti ripetuti")
    for i, (part, line, d) in enumerate(zip(parts, lines, t.degrees), start=1):
        if len(part) != d:
            violations.append(f"parte {i}: {len(part)} punti invece di {d}")
        for p in part:
            if not line.contains(p):
                violations.append(f"parte {i}: {p} non giace su L{i}")
        for j in range(i - 1):
            for p in parts[j]:
                if line.contains(p):
                    violations.append(f"L{i} contiene {p} della parte {j + 1}")
    return violations


def _random_line(rng: random.Random, bound: int) -> Line:
    while True:
        coeffs = [rng.randint(-bound, bound) for _ in range(3)]
        if any(coeffs):
            return Line(tuple(coeffs))


def _spanning_points(line: Line) -> Tuple[Tuple, Tuple]:
    candidates = [_cross(line.coeffs, e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    candidates = [c for c in candidates if any(x != 0 for x in c)]
    first = candidates[0]
    second = next(c for c in candidates[1:] if any(x != 0 for x in _cross(first, c)))
    return first, second


def generic_k_configuration(t: KConfigType, seed: int, coordinate_bound: int = 20,
                            retry_budget: int = 100) -> KConfiguration:
    """
    k-configurazione su rette razionali casuali, deterministica dal seed.
    Ogni punto giace solo sulla propria retta; la validità è verificata esattamente.
    """
    rng = random.Random(seed)
    for attempt in range(1, retry_budget + 1):
        lines: List[Line] = []
        while len(lines) < t.length:
            candidate = _random_line(rng, coordinate_bound)
            if candidate not in lines:
                lines.append(candidate)

        parts: List[Tuple[ProjPoint, ...]] = []
        used = set()
        failed = False
        for i, (line, d) in enumerate(zip(lines, t.degrees)):
            a, b = _spanning_points(line)
            part: List[ProjPoint] = []
            tries = 0
            while len(part) < d and tries < 50 * d:
                tries += 1
                lam = Fraction(rng.randint(-coordinate_bound, coordinate_bound), rng.randint(1, coordinate_bound))
                coords = tuple(Fraction(x) + lam * Fraction(y) for x, y in zip(a, b))
                if not any(coords):
                    continue
                p = ProjPoint(coords)
                if p in used or any(other.contains(p) for k, other in enumerate(lines) if k != i):
                    continue
                used.add(p)
                part.append(p)
            if len(part) < d:
                failed = True
                break
            parts.append(tuple(part))
        if failed:
            logger.debug("Tentativo %d di configurazione generica degenere, nuovo sorteggio", attempt)
            continue
        violations = validate_k_configuration(parts, lines, t)
        if not violations:
            return KConfiguration(t, tuple(parts), tuple(lines))
        logger.debug("Tentativo %d scartato: %s", attempt, violations)
    raise ConfigurationError(f"Nessuna k-configurazione generica di tipo {t} dopo {retry_budget} tentativi")


def generic_k_config(t: KConfigType, seed: int, coordinate_bound: int = 20,
                     retry_budget: int = 100) -> List[ProjPoint]:
    return generic_k_configuration(t, seed, coordinate_bound, retry_budget).points


def four_line_configuration() -> KConfiguration:
    """
    I sei punti d'intersezione di quattro rette in posizione generale, letti
    come k-configurazione di tipo (1,2,3).
    """
    t = KConfigType.of(1, 2, 3)
    lines = (Line.of(-1, 1, 1), Line.of(0, 1, 0), Line.of(0, 0, 1))
    parts = (
        (ProjPoint.of(1, -1, 2),),
        (ProjPoint.of(1, 0, 1), ProjPoint.of(1, 0, Fraction(3, 2))),
        (ProjPoint.of(1, 0, 0), ProjPoint.of(1, 1, 0), ProjPoint.of(1, 3, 0)),
    )
    return KConfiguration(t, parts, lines)


def four_line_recipe() -> CurveRecipe:
    """Le quattro rette: grado 4, molteplicità esattamente 2 in ogni punto."""
    lines = (Line.of(-1, 1, 1), Line.of(-3, 1, 2), Line.of(0, 1, 0), Line.of(0, 0, 1))
    return CurveRecipe(tuple(_component(l, 1, "row") for l in lines), 4, 2, True, "four-lines")


def two_line_scheme(b: int) -> FatPointScheme:
    """
    b punti semplici su x2 = 0, b su x2 = x0 e un punto di molteplicità b-1
    fuori da entrambe, senza allineamenti apice/P/Q: lo schema della curva
    irriducibile di grado b.
    """
    if b < 1:
        raise GeometryError("b deve essere >= 1")
    pairs = [(ProjPoint.of(1, 2 * i - 1, 0), 1) for i in range(1, b + 1)]
    pairs += [(ProjPoint.of(1, i - 1, 1), 1) for i in range(1, b + 1)]
    pairs.append((ProjPoint.of(1, 0, 2), b - 1))
    return FatPointScheme.from_pairs(pairs)


def spread_scheme(b: int, c: int) -> Tuple[List[ProjPoint], CurveRecipe]:
    """
    c punti su x2 = 0 (ascisse dispari), b punti su x2 = x0 e l'apice [1:0:2].
    La ricetta b·(x2=0) + (b-1)·(x2=x0) + rette apice-Q ha grado 3b-1 e
    molteplicità esattamente b.
    """
    if b < 1 or c < 1:
        raise GeometryError("b e c devono essere >= 1")
    apex = ProjPoint.of(1, 0, 2)
    ps = [ProjPoint.of(1, 2 * i - 1, 0) for i in range(1, c + 1)]
    qs = [ProjPoint.of(1, i - 1, 1) for i in range(1, b + 1)]
    components = [_component(Line.of(0, 0, 1), b, "row")]
    if b > 1:
        components.append(_component(Line.of(-1, 0, 1), b - 1, "row"))
    components += [_component(line_through(q, apex), 1, "join") for q in qs]
    recipe = CurveRecipe(tuple(components), 3 * b - 1, b, True, f"spread({b},{c})")
    return ps + qs + [apex], recipe


# ---------------------------------------------------------------------------
# Ricette F per famiglie di tipi
# ---------------------------------------------------------------------------

def _component(curve: Curve, multiplicity: int, role: str) -> CurveComponent:
    return CurveComponent(curve, multiplicity, f"{role} {curve}")


def _unique_curve(pairs: Sequence[Tuple[ProjPoint, int]], degree: int) -> Curve:
    """L'unica curva di grado dato per lo schema: il nucleo deve essere unidimensionale."""
    scheme = FatPointScheme.from_pairs(pairs)
    rows = [row for p, m in scheme.supports for row in vanishing_conditions(p, m, degree)]
    matrix = ExactMatrix.from_rows(rows, cols=len(monomials(degree)))
    basis = kernel_basis(matrix)
    if len(basis) != 1:
        raise RecipeError(f"Nucleo di dimensione {len(basis)} invece di 1 in grado {degree}")
    return curve_from_kernel_vector(degree, basis[0])


class _OneLineLayout:
    """Coordinate dei punti della configurazione standard (1,b,c)."""

    def __init__(self, b: int, c: int):
        self.b, self.c = b, c
        self.apex = ProjPoint.of(1, 0, 2)
        self.low = Line.of(0, 0, 1)
        self.mid = Line.of(-1, 0, 1)

    def p(self, i: int) -> ProjPoint:
        return ProjPoint.of(1, i - 1, 0)

    def q(self, i: int) -> ProjPoint:
        return ProjPoint.of(1, i - 1, 1)

    def through_odd(self, i: int) -> Line:
        # contiene p(2i-1), q(i) e l'apice
        return line_through(self.p(2 * i - 1), self.q(i))

    def through_even(self, i: int) -> Line:
        return line_through(self.p(2 * i), self.apex)

    def through_q(self, i: int) -> Line:
        return line_through(self.q(i), self.apex)


def _rows_and_joins(b: int, c: int, k: int, odd_count: int, even_count: int, q_from: int,
                    mu: int, d: int, exact: bool, label: str) -> CurveRecipe:
    lay = _OneLineLayout(b, c)
    comps = [_component(lay.low, k, "row"), _component(lay.mid, k, "row")]
    comps += [_component(lay.through_odd(i), 1, "join") for i in range(1, odd_count + 1)]
    comps += [_component(lay.through_even(i), 1, "join") for i in range(1, even_count + 1)]
    comps += [_component(lay.through_q(i), 1, "join") for i in range(q_from, b + 1)]
    return CurveRecipe(tuple(comps), d, mu, exact, label)


def recipe_row_union(t: KConfigType, k: int = 1, exact: bool = False) -> CurveRecipe:
    """k volte l'unione delle rette della configurazione standard."""
    s = t.length
    comps = tuple(_component(standard_line(s, i), k, "row") for i in range(1, s + 1))
    return CurveRecipe(comps, k * s, k, exact, f"rows x{k}")


def recipe_pencil(b: int) -> CurveRecipe:
    """Tipo (1,b): (b-1)·(x2=0) più le b rette dal punto isolato; grado 2b-1, molteplicità b."""
    apex = ProjPoint.of(1, 0, 1)
    comps = []
    if b > 1:
        comps.append(_component(Line.of(0, 0, 1), b - 1, "row"))
    comps += [_component(line_through(apex, ProjPoint.of(1, j, 0)), 1, "join") for j in range(b)]
    return CurveRecipe(tuple(comps), 2 * b - 1, b, True, f"pencil({b})")


def recipe_even_c(b: int, c: int) -> CurveRecipe:
    if c % 2 or not b < c <= 2 * b - 4:
        raise RecipeError(f"Parametri fuori riga: b={b}, c={c}")
    return _rows_and_joins(b, c, (2 * b + c - 2) // 2, c // 2, c // 2, c // 2 + 1,
                           (2 * b + c) // 2, (6 * b + 3 * c - 4) // 2, True, f"even-c({b},{c})")


def recipe_odd_c(b: int, c: int) -> CurveRecipe:
    if c % 2 == 0 or not b + 1 < c <= 2 * b - 3:
        raise RecipeError(f"Parametri fuori riga: b={b}, c={c}")
    return _rows_and_joins(b, c, (2 * b + c - 3) // 2, (c + 1) // 2, (c - 1) // 2, (c + 3) // 2,
                           (2 * b + c - 1) // 2, (6 * b + 3 * c - 7) // 2, False, f"odd-c({b},{c})")


def recipe_b_plus_one(b: int) -> CurveRecipe:
    if b % 2 or b < 4:
        raise RecipeError(f"Parametro fuori riga: b={b}")
    return _rows_and_joins(b, b + 1, (3 * b - 2) // 2, b // 2 + 1, b // 2, b // 2 + 2,
                           3 * b // 2, (9 * b - 4) // 2, True, f"b-plus-one({b})")


def _apex_curve(lay: _OneLineLayout, p_indices: Sequence[int], q_indices: Sequence[int],
                degree: int) -> Curve:
    pairs = [(lay.p(i), 1) for i in p_indices] + [(lay.q(i), 1) for i in q_indices]
    pairs.append((lay.apex, degree - 1))
    return _unique_curve(pairs, degree)


def recipe_curves_2b_minus_2(b: int) -> CurveRecipe:
    if b <= 2:
        raise RecipeError(f"Parametro fuori riga: b={b}")
    lay = _OneLineLayout(b, 2 * b - 2)
    evens = [2 * i for i in range(1, b)]
    comps = [
        _component(lay.low, 2 * b * b - 5 * b + 2, "row"),
        _component(lay.mid, 2 * b * b - 6 * b + 4, "row"),
    ]
    comps += [_component(lay.through_odd(i), b - 1, "join") for i in range(1, b)]
    comps.append(_component(lay.through_q(b), b - 2, "join"))
    for i in range(1, b):
        others = [j for j in range(1, b + 1) if j != i]
        comps.append(_component(_apex_curve(lay, evens, others, b - 1), 1, "kernel"))
    mu, d = 2 * b * b - 4 * b + 1, 6 * b * b - 14 * b + 6
    return CurveRecipe(tuple(comps), d, mu, True, f"curves-2b-2({b})")


def recipe_curves_2b_minus_1(b: int) -> CurveRecipe:
    if b < 2:
        raise RecipeError(f"Parametro fuori riga: b={b}")
    lay = _OneLineLayout(b, 2 * b - 1)
    evens = [2 * i for i in range(1, b)]
    comps = [
        _component(lay.low, 2 * b * b - 3 * b, "row"),
        _component(lay.mid, 2 * b * b - 4 * b + 1, "row"),
    ]
    comps += [_component(lay.through_odd(i), b, "join") for i in range(1, b + 1)]
    for i in range(1, b + 1):
        others = [j for j in range(1, b + 1) if j != i]
        comps.append(_component(_apex_curve(lay, evens, others, b - 1), 1, "kernel"))
    mu, d = 2 * b * b - 2 * b, 6 * b * b - 8 * b + 1
    return CurveRecipe(tuple(comps), d, mu, True, f"curves-2b-1({b})")


def recipe_curve_2b(b: int) -> CurveRecipe:
    if b < 2:
        raise RecipeError(f"Parametro fuori riga: b={b}")
    lay = _OneLineLayout(b, 2 * b)
    evens = [2 * i for i in range(1, b + 1)]
    comps = [
        _component(lay.low, 2 * b - 2, "row"),
        _component(lay.mid, 2 * b - 3, "row"),
    ]
    comps += [_component(lay.through_odd(i), 1, "join") for i in range(1, b + 1)]
    comps.append(_component(_apex_curve(lay, evens, range(1, b + 1), b), 1, "kernel"))
    return CurveRecipe(tuple(comps), 6 * b - 5, 2 * b - 1, True, f"curve-2b({b})")


def recipe_curves_2b_plus_1(b: int) -> CurveRecipe:
    if b < 2:
        raise RecipeError(f"Parametro fuori riga: b={b}")
    lay = _OneLineLayout(b, 2 * b + 1)
    comps = [
        _component(lay.low, 2 * b * b - b - 1, "row"),
        _component(lay.mid, 2 * b * b - 2 * b - 2, "row"),
    ]
    comps += [_component(lay.through_odd(i), b, "join") for i in range(1, b + 1)]
    qs = range(1, b + 1)
    for i in range(1, b + 1):
        ps = [2 * j for j in range(1, b + 1) if j != i] + [2 * b + 1]
        comps.append(_component(_apex_curve(lay, ps, qs, b), 1, "kernel"))
    comps.append(_component(_apex_curve(lay, [2 * j for j in range(1, b + 1)], qs, b), 1, "kernel"))
    mu, d = 2 * b * b - 1, 6 * b * b - 2 * b - 3
    return CurveRecipe(tuple(comps), d, mu, True, f"curves-2b+1({b})")


def recipe_stable_c(b: int, c: int) -> CurveRecipe:
    if c < 2 * b + 2:
        raise RecipeError(f"Parametri fuori riga: b={b}, c={c}")
    lay = _OneLineLayout(b, c)
    comps = [_component(lay.low, b, "row")]
    if b > 1:
        comps.append(_component(lay.mid, b - 1, "row"))
    comps += [_component(lay.through_odd(i), 1, "join") for i in range(1, b + 1)]
    return CurveRecipe(tuple(comps), 3 * b - 1, b, False, f"stable-c({b},{c})")


def recipe_conic_234() -> CurveRecipe:
    """Tipo (2,3,4): rette con molteplicità 3,2,3,2,2,3 più la conica per sei punti; grado 17, molteplicità 6."""
    p = lambda i: ProjPoint.of(1, i - 1, 0)
    q = lambda i: ProjPoint.of(1, i - 1, 1)
    r1, r2 = ProjPoint.of(1, 0, 2), ProjPoint.of(1, 1, 2)
    conic = _unique_curve([(p(2), 1), (p(3), 1), (q(1), 1), (q(3), 1), (r1, 1), (r2, 1)], 2)
    comps = (
        _component(Line.of(0, 0, 1), 3, "row"),
        _component(Line.of(-1, 0, 1), 2, "row"),
        _component(Line.of(0, 1, 0), 3, "join"),
        _component(Line.of(-1, 1, 0), 2, "join"),
        _component(Line.of(-2, 1, 1), 2, "join"),
        _component(Line.of(-3, 1, 1), 3, "join"),
        _component(conic, 1, "kernel"),
    )
    return CurveRecipe(comps, 17, 6, True, "conic(2,3,4)")


def build_recipe(t: KConfigType) -> CurveRecipe:
    """Curva F della riga di catalogo che contiene il tipo."""
    from src.table_catalogue import match_row

    row = match_row(t)
    if row is None or row.recipe is None:
        raise RecipeError(f"Nessuna ricetta disponibile per il tipo {t}")
    return row.recipe(t)
