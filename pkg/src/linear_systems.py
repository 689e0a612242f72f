"""
Sistemi lineari [I_Z]_d di curve piane per uno schema di punti grassi:
dimensione, base, ricerca del grado iniziale alpha.
"""
import logging
from dataclasses import dataclass
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

from src.cache_utils import AlphaCache, ResultCache
from src.exact_algebra import ExactMatrix, bareiss_rank, kernel_basis, modular_ranks
from src.plane_geometry import (
    FatPointScheme,
    GeometryError,
    Line,
    PolyCurve,
    ProjPoint,
    line_through,
    monomials,
    support_hash,
    vanishing_conditions,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankPolicy:
    """
    Percorso di calcolo del rango.

    Una dimensione 0 ottenuta modulo un qualunque primo è esatta (per una
    matrice intera il rango modulo p non supera quello razionale). Le dimensioni
    positive sono confermate con Bareiss fino a `rational_column_cutoff` colonne,
    oltre restano multimodulari e non certificate.
    """
    rational_column_cutoff: int = 91
    num_primes: int = 2
    prime_seed: Optional[int] = 20240917
    numpy_column_threshold: int = 600

    @classmethod
    def from_config(cls, config_manager) -> "RankPolicy":
        return cls(
            rational_column_cutoff=config_manager.get_nested("rank", "rational_column_cutoff", default=91),
            num_primes=config_manager.get_nested("rank", "num_primes", default=2),
            prime_seed=config_manager.get_nested("rank", "prime_seed", default=20240917),
            numpy_column_threshold=config_manager.get_nested("rank", "numpy_column_threshold", default=600),
        )


DEFAULT_POLICY = RankPolicy()


@dataclass(frozen=True)
class LinearSystemQuery:
    scheme: FatPointScheme
    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise GeometryError(f"Grado negativo: {self.degree}")


@dataclass(frozen=True)
class DimResult:
    dimension: int
    expected_dimension: int
    superabundance: int
    method: str
    certified: bool


@dataclass(frozen=True)
class NotFoundBelowCap:
    """Nessuna curva trovata fino al grado massimo `cap` incluso."""
    cap: int


AlphaValue = Union[int, NotFoundBelowCap]

_dim_cache = ResultCache(cache_size=2048)


def set_result_cache_size(cache_size: int):
    """Dimensione della cache in memoria dei risultati (config: result_cache_size)."""
    if cache_size < 1:
        raise ValueError("result_cache_size deve essere >= 1")
    _dim_cache.cache_size = cache_size


def expected_dimension(scheme: FatPointScheme, degree: int) -> int:
    return comb(degree + 2, 2) - scheme.total_conditions()


def interpolation_matrix(scheme: FatPointScheme, degree: int) -> ExactMatrix:
    """Colonne: monomi di grado d (graded-lex); righe: condizioni locali di ogni punto."""
    rows = [row for p, m in scheme.supports for row in vanishing_conditions(p, m, degree)]
    return ExactMatrix.from_rows(rows, cols=len(monomials(degree)))


def _result(dimension: int, expected: int, method: str, certified: bool) -> DimResult:
    return DimResult(dimension, expected, dimension - max(0, expected), method, certified)


def dim_linear_system(q: LinearSystemQuery, policy: RankPolicy = DEFAULT_POLICY) -> DimResult:
    """Dimensione di [I_Z]_d con il percorso di rango descritto in RankPolicy."""
    scheme, d = q.scheme, q.degree
    cols = comb(d + 2, 2)
    expected = cols - scheme.total_conditions()

    if scheme.is_empty():
        return _result(cols, expected, "no-conditions", True)
    if scheme.max_multiplicity() > d:
        # una forma non nulla di grado d ha molteplicità <= d in ogni punto
        return _result(0, expected, "multiplicity-exceeds-degree", True)

    key = (scheme.content_hash(), d, policy)
    cached = _dim_cache.get(key)
    if cached is not None:
        return cached

    matrix = interpolation_matrix(scheme, d)
    int_rows, multipliers = matrix.cleared_rows()
    small = cols > policy.numpy_column_threshold
    logger.info("Sistema %dx%d in grado %d (%s)", matrix.rows, cols, d,
                "numpy mod p" if small else "interi mod p")
    ranks = modular_ranks(int_rows, cols, multipliers, policy.num_primes, seed=policy.prime_seed,
                          small=small, working_degree=d, stop_at_full=True)
    modular = max(r for _, r in ranks)

    if modular == cols:
        result = _result(0, expected, "modular-zero", True)
    elif cols <= policy.rational_column_cutoff:
        exact_rank = bareiss_rank(int_rows, cols)
        result = _result(cols - exact_rank, expected, "rational-bareiss", True)
    else:
        result = _result(cols - modular, expected, "multimodular", False)
        logger.debug("Dimensione %d non certificata (primi: %s)", result.dimension, [p for p, _ in ranks])

    _dim_cache.set(key, result)
    return result


def is_nonempty(scheme: FatPointScheme, degree: int,
                policy: RankPolicy = DEFAULT_POLICY) -> Tuple[bool, bool]:
    """(sistema non vuoto, risposta certificata)."""
    if degree < 0:
        return False, True
    if degree >= scheme.max_multiplicity() and expected_dimension(scheme, degree) > 0:
        return True, True
    result = dim_linear_system(LinearSystemQuery(scheme, degree), policy)
    return result.dimension > 0, result.certified


def alpha(scheme: FatPointScheme, degree_cap: int, policy: RankPolicy = DEFAULT_POLICY,
          hint: Optional[int] = None) -> AlphaValue:
    """
    Minimo d con [I_Z]_d non nullo. La ricerca parte da max m_i e sale.

    Con `hint`, se [I_Z]_{hint-1} è certificato vuoto la ricerca parte da hint
    (i sistemi vuoti restano vuoti scendendo di grado).
    """
    start = scheme.max_multiplicity()
    if degree_cap < start:
        raise ValueError(f"degree_cap {degree_cap} inferiore alla molteplicità massima {start}")
    if hint is not None and start < hint <= degree_cap:
        nonempty, _ = is_nonempty(scheme, hint - 1, policy)
        if not nonempty:
            start = hint
    for d in range(start, degree_cap + 1):
        nonempty, certified = is_nonempty(scheme, d, policy)
        if nonempty:
            if not certified:
                logger.info("alpha = %d con non vuotezza multimodulare", d)
            return d
    logger.warning("Nessuna curva fino al grado %d", degree_cap)
    return NotFoundBelowCap(degree_cap)


def default_degree_cap(scheme: FatPointScheme, factor: int = 4) -> int:
    """factor · somma delle molteplicità, mai sotto la molteplicità massima."""
    return max(1, scheme.max_multiplicity(), factor * sum(scheme.multiplicities))


def alpha_symbolic(points: Sequence[ProjPoint], t: int, degree_cap: Optional[int] = None,
                   policy: RankPolicy = DEFAULT_POLICY, hint: Optional[int] = None,
                   cache: Optional[AlphaCache] = None) -> AlphaValue:
    """alpha(I^(t)) = alpha dello schema tX, con cache persistente opzionale."""
    if t < 1:
        raise ValueError("t deve essere >= 1")
    key = support_hash(points)
    scheme = FatPointScheme.uniform(points, t)
    cap = degree_cap if degree_cap is not None else default_degree_cap(scheme)
    if cache is not None:
        cached = cache.get(key, t)
        if cached is not None:
            return cached if cached <= cap else NotFoundBelowCap(cap)
    value = alpha(scheme, cap, policy, hint)
    if cache is not None and isinstance(value, int):
        cache.put(key, t, value)
    return value


def system_basis(q: LinearSystemQuery) -> List[PolyCurve]:
    """Base razionale di [I_Z]_d; ogni elemento è verificato punto per punto."""
    matrix = interpolation_matrix(q.scheme, q.degree)
    basis = [PolyCurve.from_coefficients(q.degree, v) for v in kernel_basis(matrix)]
    for curve in basis:
        for p, m in q.scheme.supports:
            if curve.vanishing_order(p) < m:
                raise RuntimeError(f"Elemento di base con ordine insufficiente in {p}")
    return basis


def has_linear_component(c: PolyCurve, candidates: Sequence[Line]) -> List[Line]:
    """Rette candidate la cui forma divide c esattamente (divisione polinomiale sympy)."""
    poly = c.to_sympy()
    found = []
    for line in candidates:
        _, remainder = poly.div(line.to_sympy())
        if remainder.is_zero:
            found.append(line)
    return found


def lines_through_pairs(points: Sequence[ProjPoint]) -> List[Line]:
    """Rette distinte per almeno due dei punti, in ordine lessicografico dei coefficienti."""
    lines = set()
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            lines.add(line_through(p, q))
    return sorted(lines, key=lambda l: l.sort_key())
