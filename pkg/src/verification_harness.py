"""
Verifica delle righe del catalogo sulle configurazioni standard.

Per ogni tipo: costruzione e audit della ricetta F, certificati di vuotezza
in grado m·d-1 con controllo incrociato di rango, stabilizzazione alpha(m·mu·X) = m·d,
intervallo di Chudnovsky e confronto della forma chiusa con d/mu.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.bezout_reduction import (
    ReductionCertificate,
    certificate_id,
    emptiness_certificate,
    verify_certificate,
)
from src.cache_utils import AlphaCache
from src.exact_algebra import format_rational
from src.linear_systems import (
    DEFAULT_POLICY,
    LinearSystemQuery,
    RankPolicy,
    alpha_symbolic,
    dim_linear_system,
)
from src.plane_geometry import (
    CurveRecipe,
    FatPointScheme,
    KConfigType,
    RecipeError,
    audit_recipe,
    spread_scheme,
    standard_k_config,
    support_hash,
)
from src.table_catalogue import (
    TableRow,
    enumerate_types,
    is_degenerate,
    match_row,
    step_function_pairs,
    subset_witness,
)
from src.waldschmidt import (
    Bracket,
    ClosedForm,
    chudnovsky_lower_bound,
    closed_form,
    verify_stabilization,
    witness_covers,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_MATRIX_ENTRIES = 1_000_000


class CheckStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"
    INCONCLUSIVE = "inconclusive"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    detail: str = ""


@dataclass
class VerificationOutcome:
    type: KConfigType
    row_key: Optional[str]
    closed_form: ClosedForm
    mu: Optional[int] = None
    d: Optional[int] = None
    checks: List[CheckResult] = field(default_factory=list)
    bracket: Optional[Bracket] = None
    certificate_ids: List[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def failed(self) -> bool:
        return any(c.status == CheckStatus.FAILED for c in self.checks)

    def status_counts(self) -> Dict[str, int]:
        counts = {s.value: 0 for s in CheckStatus}
        for c in self.checks:
            counts[c.status.value] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        """Corpo deterministico: il tempo impiegato resta fuori."""
        bracket = None
        if self.bracket is not None:
            bracket = {
                "lower": format_rational(self.bracket.lower),
                "upper": format_rational(self.bracket.upper) if self.bracket.upper is not None else None,
                "upper_t": self.bracket.upper_t,
            }
        return {
            "type": str(self.type),
            "row": self.row_key,
            "closed_form": self.closed_form.to_dict(),
            "mu": self.mu,
            "d": self.d,
            "bracket": bracket,
            "checks": [{"name": c.name, "status": c.status.value, "detail": c.detail} for c in self.checks],
            "certificates": list(self.certificate_ids),
            "failed": self.failed,
        }


def matrix_entries(scheme: FatPointScheme, degree: int) -> int:
    """Numero di elementi della matrice di interpolazione di [I_Z]_d."""
    return scheme.total_conditions() * comb(degree + 2, 2)


class _CheckRunner:
    """Esegue i controlli in ordine rispettando il budget di tempo."""

    def __init__(self, outcome: VerificationOutcome, budget_seconds: float, degenerate: bool):
        self.outcome = outcome
        self.budget_seconds = budget_seconds
        self.degenerate = degenerate
        self.started = time.monotonic()

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def run(self, name: str, check: Callable[[], Tuple[CheckStatus, str]]) -> CheckStatus:
        if self.elapsed() > self.budget_seconds:
            logger.warning("Budget esaurito per %s: controllo %s saltato", self.outcome.type, name)
            return self._record(name, CheckStatus.SKIPPED, "budget exhausted")
        try:
            status, detail = check()
        except RecipeError as e:
            status, detail = CheckStatus.FAILED, f"recipe error: {e}"
        if status == CheckStatus.FAILED and self.degenerate:
            status, detail = CheckStatus.DEGENERATE, f"degenerate parameters: {detail}"
        if status == CheckStatus.FAILED:
            logger.error("Controllo %s fallito per %s: %s", name, self.outcome.type, detail)
        return self._record(name, status, detail)

    def _record(self, name: str, status: CheckStatus, detail: str) -> CheckStatus:
        self.outcome.checks.append(CheckResult(name, status, detail))
        return status


def _passed(ok: bool, detail: str) -> Tuple[CheckStatus, str]:
    return (CheckStatus.PASSED if ok else CheckStatus.FAILED), detail


def verify_type(t: KConfigType, m_max: int = 2, budget_seconds: float = 600.0,
                policy: RankPolicy = DEFAULT_POLICY, cache: Optional[AlphaCache] = None,
                long_run: bool = False,
                max_matrix_entries: int = DEFAULT_MAX_MATRIX_ENTRIES) -> VerificationOutcome:
    """Esegue tutti i controlli della riga di catalogo del tipo sulla configurazione standard."""
    row = match_row(t)
    outcome = VerificationOutcome(t, row.key if row else None, closed_form(t))
    if row is None:
        outcome.checks.append(CheckResult("catalogue", CheckStatus.SKIPPED, "uncatalogued type"))
        return outcome

    runner = _CheckRunner(outcome, budget_seconds, is_degenerate(t))
    points = standard_k_config(t)
    limit = None if long_run else max_matrix_entries

    def affordable(scheme: FatPointScheme, degree: int) -> bool:
        return limit is None or matrix_entries(scheme, degree) <= limit

    logger.info("Verifica del tipo %s (riga %s)", t, row.key)
    if row.is_interval:
        _verify_interval_row(t, row, points, runner, policy, cache, long_run, affordable)
    else:
        _verify_pair_row(t, row, points, m_max, runner, policy, cache, limit, affordable)

    outcome.wall_time = runner.elapsed()
    logger.info("Tipo %s verificato in %.1f s: %s", t, outcome.wall_time, outcome.status_counts())
    return outcome


def _verify_pair_row(t: KConfigType, row: TableRow, points, m_max: int, runner: _CheckRunner,
                     policy: RankPolicy, cache: Optional[AlphaCache], limit: Optional[int],
                     affordable: Callable[[FatPointScheme, int], bool]):
    outcome = runner.outcome
    mu, d = row.instantiate(t)
    outcome.mu, outcome.d = mu, d
    recipe: Optional[CurveRecipe] = None

    def check_recipe():
        nonlocal recipe
        recipe = row.recipe(t)
        audit = audit_recipe(recipe, points)
        return _passed(
            audit.ok and recipe.declared_degree == d and recipe.declared_point_multiplicity == mu,
            f"degree {recipe.computed_degree()}, multiplicities {sorted(set(audit.multiplicities))}, "
            f"{'exact' if audit.exact else 'at least'}",
        )

    runner.run("recipe", check_recipe)

    stabilized: Dict[int, bool] = {}
    for m in range(1, m_max + 1):
        scheme = FatPointScheme.uniform(points, m * mu)
        below = m * d - 1
        certified_empty = False

        def check_certificate():
            nonlocal certified_empty
            hints = recipe.components if recipe is not None else ()
            cert = emptiness_certificate(scheme, below, hints, policy, max_residual_entries=limit)
            if not isinstance(cert, ReductionCertificate):
                return CheckStatus.INCONCLUSIVE, f"no terminal predicate after {len(cert.steps)} steps"
            if not verify_certificate(cert, policy):
                return CheckStatus.FAILED, "certificate replay rejected"
            outcome.certificate_ids.append(certificate_id(cert))
            certified_empty = True
            detail = f"{cert.terminal_reason.value} after {len(cert.steps)} steps"
            if affordable(scheme, below):
                rank_dim = dim_linear_system(LinearSystemQuery(scheme, below), policy).dimension
                if rank_dim != 0:
                    return CheckStatus.FAILED, f"{detail}, but rank gives dimension {rank_dim}"
                detail += ", rank agrees"
            else:
                detail += ", rank cross-check skipped"
            return CheckStatus.PASSED, detail

        runner.run(f"certificate m={m} degree={below}", check_certificate)

        def check_stabilization():
            witness = recipe.scaled(m) if recipe is not None else None
            covered = witness is not None and witness_covers(witness, points, m * mu, m * d)
            if certified_empty and covered:
                if cache is not None:
                    cache.put(support_hash(points), m * mu, m * d)
                stabilized[m] = True
                return CheckStatus.PASSED, f"alpha({m * mu}X) = {m * d} by certificate and recipe"
            if not affordable(scheme, m * d):
                return CheckStatus.SKIPPED, "interpolation matrix above size limit"
            report = verify_stabilization(points, m * mu, m * d, 1, witness, policy, cache)
            verdict = report.verdicts[0]
            stabilized[m] = verdict.passed
            return _passed(verdict.passed, f"alpha({m * mu}X) = {m * d} via {verdict.witness}"
                           if verdict.passed else
                           f"empty below: {verdict.empty_below}, nonempty at {m * d}: {verdict.nonempty_at}")

        runner.run(f"stabilization m={m}", check_stabilization)

    def check_closed_form():
        value = outcome.closed_form.value
        return _passed(value == Fraction(d, mu),
                       f"closed form {format_rational(value) if value is not None else None} vs d/mu = "
                       f"{format_rational(Fraction(d, mu))}")

    runner.run("closed form", check_closed_form)

    def check_bracket():
        lower = chudnovsky_lower_bound(points, policy, cache)
        if stabilized.get(1):
            upper = Fraction(d, mu)
        else:
            scheme = FatPointScheme.uniform(points, mu)
            if not affordable(scheme, d):
                return CheckStatus.SKIPPED, "interpolation matrix above size limit"
            value = alpha_symbolic(points, mu, policy=policy, hint=d, cache=cache)
            if not isinstance(value, int):
                return CheckStatus.INCONCLUSIVE, f"alpha({mu}X) not found below {value.cap}"
            upper = Fraction(value, mu)
        outcome.bracket = Bracket(lower, upper, mu, ())
        value = outcome.closed_form.value
        return _passed(outcome.bracket.contains(value),
                       f"[{format_rational(lower)}, {format_rational(upper)}] contains {format_rational(value)}")

    runner.run("bracket", check_bracket)

    def check_chudnovsky():
        if outcome.bracket is None:
            return CheckStatus.SKIPPED, "no bracket"
        lower, upper = outcome.bracket.lower, outcome.bracket.upper
        return _passed(lower <= upper, f"{format_rational(upper)} >= {format_rational(lower)}")

    runner.run("chudnovsky", check_chudnovsky)

    sub = subset_witness(t)
    if sub is not None:
        runner.run(f"subset {sub}", lambda: _check_subset(t, sub, points, mu, d, policy, cache, affordable))
    if row.key == "1,b,c>=2b+2":
        b, c = t.degrees[1], t.degrees[2]
        runner.run(f"spread ({b},{c})", lambda: _check_spread(b, c, policy, cache, affordable))


def _check_subset(t: KConfigType, sub: KConfigType, points, mu: int, d: int, policy: RankPolicy,
                  cache: Optional[AlphaCache], affordable) -> Tuple[CheckStatus, str]:
    """Inclusione esatta delle configurazioni e alpha(mu·X') <= alpha(mu·X) = d."""
    sub_points = standard_k_config(sub)
    point_set = set(points)
    if not all(p in point_set for p in sub_points):
        return CheckStatus.FAILED, f"standard {sub} is not contained in standard {t}"
    scheme = FatPointScheme.uniform(sub_points, mu)
    if not affordable(scheme, d):
        return CheckStatus.SKIPPED, "interpolation matrix above size limit"
    value = alpha_symbolic(sub_points, mu, degree_cap=d, policy=policy, hint=d, cache=cache)
    if not isinstance(value, int):
        return CheckStatus.FAILED, f"alpha({mu}X') above {d}"
    return CheckStatus.PASSED, f"alpha({mu}X') = {value} <= {d}"


def _check_spread(b: int, c: int, policy: RankPolicy, cache: Optional[AlphaCache],
                  affordable) -> Tuple[CheckStatus, str]:
    """c punti su una retta, b su un'altra e un apice: alpha(b·Y) = 3b-1, lo stesso valore della riga."""
    spread_points, recipe = spread_scheme(b, c)
    audit = audit_recipe(recipe, spread_points)
    if not audit.ok:
        return CheckStatus.FAILED, f"spread recipe multiplicities {sorted(set(audit.multiplicities))}"
    if not affordable(FatPointScheme.uniform(spread_points, b), 3 * b - 1):
        return CheckStatus.SKIPPED, "recipe audited, interpolation matrix above size limit"
    report = verify_stabilization(spread_points, b, 3 * b - 1, 1, recipe, policy, cache)
    return _passed(report.passed, f"alpha({b}Y) = {3 * b - 1} via {report.verdicts[0].witness}"
                   if report.passed else "spread configuration does not stabilize at (b, 3b-1)")


def _verify_interval_row(t: KConfigType, row: TableRow, points, runner: _CheckRunner,
                         policy: RankPolicy, cache: Optional[AlphaCache], long_run: bool,
                         affordable: Callable[[FatPointScheme, int], bool]):
    """(2,3,5): estremo inferiore dal sottoinsieme (2,3,4), superiore da una curva di grado 71."""
    outcome = runner.outcome
    low, high = outcome.closed_form.interval
    sub = subset_witness(t)

    def check_lower():
        sub_row = match_row(sub)
        mu, d = sub_row.instantiate(sub)
        sub_points = standard_k_config(sub)
        if not set(sub_points) <= set(points):
            return CheckStatus.FAILED, f"standard {sub} is not contained in standard {t}"
        sub_alpha = alpha_symbolic(sub_points, mu, policy=policy, hint=d, cache=cache)
        direct = dim_linear_system(LinearSystemQuery(FatPointScheme.uniform(points, mu), d - 1), policy)
        ok = sub_alpha == d and direct.dimension == 0 and Fraction(d, mu) == low
        return _passed(ok, f"alpha({mu}X') = {sub_alpha}, dim [I_{mu}X]_{d - 1} = {direct.dimension}")

    runner.run("interval lower endpoint", check_lower)

    def check_upper():
        mu, d = high.denominator, high.numerator
        scheme = FatPointScheme.uniform(points, mu)
        if not long_run:
            return CheckStatus.SKIPPED, f"dim [I_{mu}X]_{d} needs --long-run"
        if not affordable(scheme, d):
            return CheckStatus.SKIPPED, "interpolation matrix above size limit"
        result = dim_linear_system(LinearSystemQuery(scheme, d), policy)
        return _passed(result.dimension >= 1, f"dim [I_{mu}X]_{d} = {result.dimension} ({result.method})")

    runner.run("interval upper endpoint", check_upper)

    def check_chudnovsky():
        lower = chudnovsky_lower_bound(points, policy, cache)
        outcome.bracket = Bracket(lower, high, high.denominator, ())
        return _passed(lower <= low, f"{format_rational(lower)} <= {format_rational(low)}")

    runner.run("chudnovsky", check_chudnovsky)


# ---------------------------------------------------------------------------
# Tabella completa
# ---------------------------------------------------------------------------

@dataclass
class TableReport:
    outcomes: List[VerificationOutcome]
    step_checks: List[CheckResult]
    uncatalogued: List[str]
    parameters: Dict[str, Any]

    @property
    def failed(self) -> bool:
        return any(o.failed for o in self.outcomes) or any(
            c.status == CheckStatus.FAILED for c in self.step_checks
        )

    def timings(self) -> Dict[str, float]:
        return {str(o.type): round(o.wall_time, 3) for o in self.outcomes}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameters": dict(self.parameters),
            "types": [o.to_dict() for o in self.outcomes],
            "step_function": [{"name": c.name, "status": c.status.value, "detail": c.detail}
                              for c in self.step_checks],
            "uncatalogued": list(self.uncatalogued),
            "failed": self.failed,
        }

    def to_rows(self) -> List[Dict[str, Any]]:
        """Una riga per tipo, con le colonne del catalogo e l'esito dei controlli."""
        rows = []
        for o in self.outcomes:
            cf = o.closed_form
            if cf.value is not None:
                value = format_rational(cf.value)
            elif cf.interval is not None:
                value = " .. ".join(format_rational(x) for x in cf.interval)
            else:
                value = "unknown"
            counts = o.status_counts()
            rows.append({
                "type": str(o.type),
                "row": o.row_key,
                "value": value,
                "mu": o.mu,
                "d": o.d,
                "passed": counts["passed"],
                "failed": counts["failed"],
                "skipped": counts["skipped"],
                "inconclusive": counts["inconclusive"],
                "degenerate": counts["degenerate"],
            })
        return rows


def step_function_checks(b_max: int, c_max: int, policy: RankPolicy = DEFAULT_POLICY,
                         cache: Optional[AlphaCache] = None, compute_alpha: bool = True,
                         max_matrix_entries: Optional[int] = DEFAULT_MAX_MATRIX_ENTRIES) -> List[CheckResult]:
    """
    (1,b,c) e (1,b,c+1) con c pari <= 2b-4 hanno la stessa costante: stesse
    forme chiuse e, se calcolabile, stesso alpha in t = mu.
    """
    results = []
    for first, second in step_function_pairs(b_max, c_max):
        name = f"step {first} vs {second}"
        v1, v2 = closed_form(first).value, closed_form(second).value
        if v1 != v2:
            results.append(CheckResult(name, CheckStatus.FAILED,
                                       f"closed forms {format_rational(v1)} != {format_rational(v2)}"))
            continue
        detail = f"closed forms {format_rational(v1)}"
        if not compute_alpha:
            results.append(CheckResult(name, CheckStatus.PASSED, detail))
            continue
        mu, d = match_row(first).instantiate(first)
        schemes = [FatPointScheme.uniform(standard_k_config(x), mu) for x in (first, second)]
        if max_matrix_entries is not None and any(matrix_entries(s, d) > max_matrix_entries for s in schemes):
            results.append(CheckResult(name, CheckStatus.PASSED, detail + ", alpha comparison skipped"))
            continue
        values = [alpha_symbolic(standard_k_config(x), mu, policy=policy, hint=d, cache=cache)
                  for x in (first, second)]
        status = CheckStatus.PASSED if values[0] == values[1] else CheckStatus.FAILED
        results.append(CheckResult(name, status, f"{detail}, alpha({mu}X) = {values[0]} and {values[1]}"))
    return results


def _verify_worker(args: Tuple) -> VerificationOutcome:
    t, m_max, budget, policy, cache_path, long_run, max_entries = args
    cache = AlphaCache(cache_path) if cache_path else None
    return verify_type(t, m_max, budget, policy, cache, long_run, max_entries)


def reproduce_table(b_max: int = 5, c_max: int = 12, m_max: int = 2, budget_seconds: float = 600.0,
                    policy: RankPolicy = DEFAULT_POLICY, cache: Optional[AlphaCache] = None,
                    long_run: bool = False, workers: int = 1,
                    max_matrix_entries: int = DEFAULT_MAX_MATRIX_ENTRIES) -> TableReport:
    """Verifica ogni tipo entro i limiti e i confronti a gradino; nessun tipo viene saltato in silenzio."""
    if b_max < 1 or c_max < 1 or m_max < 1:
        raise ValueError("b_max, c_max e m_max devono essere >= 1")
    types = enumerate_types(b_max, c_max)
    uncatalogued = [str(t) for t in types if match_row(t) is None]
    for name in uncatalogued:
        logger.warning("Tipo %s non catalogato", name)
    catalogued = [t for t in types if match_row(t) is not None]
    logger.info("Riproduzione della tabella: %d tipi, m_max=%d, %d worker", len(catalogued), m_max, workers)

    if workers > 1:
        cache_path = cache.path if cache is not None else None
        jobs = [(t, m_max, budget_seconds, policy, cache_path, long_run, max_matrix_entries) for t in catalogued]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_verify_worker, jobs))
    else:
        outcomes = [verify_type(t, m_max, budget_seconds, policy, cache, long_run, max_matrix_entries)
                    for t in catalogued]

    steps = step_function_checks(b_max, c_max, policy, cache,
                                 max_matrix_entries=None if long_run else max_matrix_entries)
    parameters = {"b_max": b_max, "c_max": c_max, "m_max": m_max, "long_run": long_run}
    report = TableReport(outcomes, steps, uncatalogued, parameters)
    if report.failed:
        logger.error("La riproduzione della tabella contiene controlli falliti")
    return report
