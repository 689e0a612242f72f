"""
Interfaccia a riga di comando: ogni calcolo è un sottocomando, l'output va su
stdout come unico documento (json, csv o markdown), i log vanno su file/stderr.

Codici di uscita: 0 ok, 1 errore inatteso, 2 input malformato,
3 alpha non trovato entro il grado massimo, 4 certificato inconcludente,
5 controllo fallito (tabella o verifica di un certificato).
"""
import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from src.bezout_reduction import (
    Inconclusive,
    certificate_from_dict,
    certificate_id,
    certificate_to_dict,
    emptiness_certificate,
    verify_certificate,
)
from src.cache_utils import AlphaCache
from src.config_manager import ConfigManager
from src.linear_systems import (
    LinearSystemQuery,
    NotFoundBelowCap,
    RankPolicy,
    alpha,
    alpha_symbolic,
    default_degree_cap,
    dim_linear_system,
    set_result_cache_size,
    system_basis,
)
from src.logger_config import LoggingConfigurator
from src.plane_geometry import (
    FatPointScheme,
    GeometryError,
    KConfigType,
    ProjPoint,
    RecipeError,
    build_recipe,
    four_line_configuration,
    generic_k_config,
    monomials,
    scheme_from_json,
    standard_k_config,
    standard_k_configuration,
)
from src.report_interface import REPORT_FORMATS, ReportWriter
from src.verification_harness import matrix_entries, reproduce_table
from src.waldschmidt import build_report, compare_configurations

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MALFORMED = 2
EXIT_NOT_FOUND = 3
EXIT_INCONCLUSIVE = 4
EXIT_FAILED = 5


class SchemeFileError(ValueError):
    """File di schema illeggibile o non conforme al formato JSON atteso."""


@dataclass
class CliContext:
    config: ConfigManager
    policy: RankPolicy
    cache: Optional[AlphaCache]
    writer: ReportWriter
    fmt: str
    degree_cap: Optional[int]
    long_run: bool

    def emit(self, document: Any):
        print(self.writer.render(document, self.fmt))

    def cap_for(self, scheme: FatPointScheme) -> int:
        if self.degree_cap is not None:
            return self.degree_cap
        factor = self.config.get_nested("alpha", "degree_cap_factor", default=4)
        return default_degree_cap(scheme, factor)

    def max_matrix_entries(self) -> Optional[int]:
        if self.long_run:
            return None
        return self.config.get_nested("verification", "max_matrix_entries", default=1_000_000)


def load_scheme_file(path: str) -> FatPointScheme:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except OSError as e:
        raise SchemeFileError(f"Impossibile leggere {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemeFileError(f"JSON non valido in {path}: {e}") from e
    try:
        return scheme_from_json(document)
    except (GeometryError, TypeError) as e:
        raise SchemeFileError(f"Schema non valido in {path}: {e}") from e


def _type_points(args: argparse.Namespace, ctx: CliContext) -> List[ProjPoint]:
    t = KConfigType.parse(args.type)
    seed = getattr(args, "generic_seed", None)
    if seed is not None:
        return generic_k_config(
            t, seed,
            coordinate_bound=ctx.config.get_nested("generic", "coordinate_bound", default=20),
            retry_budget=ctx.config.get_nested("generic", "retry_budget", default=100),
        )
    return standard_k_config(t)


def _input_scheme(args: argparse.Namespace, ctx: CliContext, mult: int = 1) -> FatPointScheme:
    """Schema da --scheme (molteplicità moltiplicate per mult) o da --type (mult·X)."""
    if args.scheme:
        scheme = load_scheme_file(args.scheme)
        return FatPointScheme(tuple((p, m * mult) for p, m in scheme.supports))
    if args.type:
        return FatPointScheme.uniform(_type_points(args, ctx), mult)
    raise ValueError("Specificare --scheme oppure --type")


# ---------------------------------------------------------------------------
# Sottocomandi
# ---------------------------------------------------------------------------

def cmd_dims(args: argparse.Namespace, ctx: CliContext) -> int:
    scheme = _input_scheme(args, ctx, args.mult)
    result = dim_linear_system(LinearSystemQuery(scheme, args.degree), ctx.policy)
    ctx.emit({"degree": args.degree, **dataclasses.asdict(result)})
    return EXIT_OK


def cmd_alpha(args: argparse.Namespace, ctx: CliContext) -> int:
    if args.t < 1:
        raise ValueError("--t deve essere >= 1")
    if args.scheme:
        scheme = _input_scheme(args, ctx, args.t)
        value = alpha(scheme, ctx.cap_for(scheme), ctx.policy)
    else:
        points = _type_points(args, ctx)
        value = alpha_symbolic(points, args.t, ctx.cap_for(FatPointScheme.uniform(points, args.t)), ctx.policy,
                               cache=ctx.cache)
    if isinstance(value, NotFoundBelowCap):
        ctx.emit({"t": args.t, "alpha": None, "status": f"not found below degree {value.cap}"})
        return EXIT_NOT_FOUND
    ctx.emit({"t": args.t, "alpha": value})
    return EXIT_OK


def cmd_waldschmidt(args: argparse.Namespace, ctx: CliContext) -> int:
    ktype = KConfigType.parse(args.type) if args.type else None
    points = load_scheme_file(args.scheme).points if args.scheme else _type_points(args, ctx)
    report = build_report(points, args.t_max, ktype, args.m_max, ctx.degree_cap, ctx.policy, ctx.cache)
    ctx.emit(report.to_dict())
    if any(not e.found for e in report.seq):
        return EXIT_NOT_FOUND
    return EXIT_OK


def _load_certificate_document(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except OSError as e:
        raise SchemeFileError(f"Impossibile leggere {path}: {e}") from e
    if isinstance(document, dict) and "certificate" in document:
        document = document["certificate"]
    return document


def cmd_certificate(args: argparse.Namespace, ctx: CliContext) -> int:
    if args.verify_only:
        try:
            cert = certificate_from_dict(_load_certificate_document(args.verify_only))
        except (KeyError, TypeError) as e:
            raise SchemeFileError(f"Certificato non valido: {e}") from e
        verified = verify_certificate(cert, ctx.policy)
        ctx.emit({"certificate_id": certificate_id(cert), "verified": verified})
        return EXIT_OK if verified else EXIT_FAILED

    if not args.type or args.mu is None or args.d is None:
        raise ValueError("--type, --mu e --d sono obbligatori senza --verify-only")
    if min(args.mu, args.d, args.m) < 1:
        raise ValueError("--mu, --d e --m devono essere >= 1")
    t = KConfigType.parse(args.type)
    points = _type_points(args, ctx)
    scheme = FatPointScheme.uniform(points, args.m * args.mu)
    degree = args.m * args.d - 1
    try:
        hints = build_recipe(t).components if args.generic_seed is None else ()
    except RecipeError as e:
        logger.warning("Nessun suggerimento dalla ricetta per %s: %s", t, e)
        hints = ()

    cert = emptiness_certificate(scheme, degree, hints, ctx.policy, ctx.max_matrix_entries())
    document: Dict[str, Any] = {"type": str(t), "degree": degree, "certificate": certificate_to_dict(cert)}
    if isinstance(cert, Inconclusive):
        document["verified"] = False
        ctx.emit(document)
        return EXIT_INCONCLUSIVE

    document["certificate_id"] = certificate_id(cert)
    document["verified"] = verify_certificate(cert, ctx.policy)
    limit = ctx.max_matrix_entries()
    if limit is None or matrix_entries(scheme, degree) <= limit:
        result = dim_linear_system(LinearSystemQuery(scheme, degree), ctx.policy)
        document["rank_check"] = {"dimension": result.dimension, "agrees": result.dimension == 0,
                                  "method": result.method}
    else:
        document["rank_check"] = None
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as f:
            json.dump(document["certificate"], f, indent=2, sort_keys=True)
        logger.info("Certificato scritto in %s", args.output)
    ctx.emit(document)
    agrees = document["rank_check"] is None or document["rank_check"]["agrees"]
    return EXIT_OK if document["verified"] and agrees else EXIT_FAILED


def cmd_table(args: argparse.Namespace, ctx: CliContext) -> int:
    def verification(key: str, default: Any) -> Any:
        return ctx.config.get_nested("verification", key, default=default)

    budget_key = "long_run_budget_seconds" if ctx.long_run else "budget_seconds"
    report = reproduce_table(
        b_max=args.b_max if args.b_max is not None else verification("b_max", 5),
        c_max=args.c_max if args.c_max is not None else verification("c_max", 12),
        m_max=args.m_max if args.m_max is not None else verification("m_max", 2),
        budget_seconds=args.budget if args.budget is not None else verification(budget_key, 600),
        policy=ctx.policy,
        cache=ctx.cache,
        long_run=ctx.long_run,
        workers=args.workers if args.workers is not None else verification("workers", 1),
        max_matrix_entries=verification("max_matrix_entries", 1_000_000),
    )
    if not args.no_write:
        ctx.writer.write_table_report(report)
    ctx.emit(report.to_rows() if ctx.fmt != "json" else report.to_dict())
    return EXIT_FAILED if report.failed else EXIT_OK


def cmd_basis(args: argparse.Namespace, ctx: CliContext) -> int:
    scheme = _input_scheme(args, ctx, args.mult)
    basis = system_basis(LinearSystemQuery(scheme, args.degree))
    ctx.emit({
        "degree": args.degree,
        "monomials": [list(e) for e in monomials(args.degree)],
        "basis": [curve.coefficients_glex() for curve in basis],
    })
    return EXIT_OK


def cmd_demo(args: argparse.Namespace, ctx: CliContext) -> int:
    """Quattro rette generali contro la (1,2,3) standard: stesso tipo, successioni diverse."""
    standard = standard_k_configuration(KConfigType.of(1, 2, 3))
    ctx.emit(compare_configurations(four_line_configuration(), standard, args.t_max, ctx.policy, ctx.cache))
    return EXIT_OK


def cmd_cache(args: argparse.Namespace, ctx: CliContext) -> int:
    if ctx.cache is None:
        raise ValueError("Cache disabilitata")
    if args.action == "clear":
        ctx.cache.clear()
    elif args.action == "compact":
        ctx.cache.compact()
    ctx.emit(ctx.cache.stats())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser e avvio
# ---------------------------------------------------------------------------

def _add_input_arguments(parser: argparse.ArgumentParser, generic: bool = True):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--scheme", help="File JSON dello schema")
    group.add_argument("--type", help="Tipo della k-configurazione standard, es. 1,2,6")
    if generic:
        parser.add_argument("--generic-seed", type=int, default=None,
                            help="Usa una k-configurazione generica con questo seed")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=REPORT_FORMATS, default="json")
    common.add_argument("--degree-cap", type=int, default=None)
    common.add_argument("--primes", type=int, default=None, help="Numero di primi per il rango modulare")
    common.add_argument("--cache", default=None, help="Percorso della cache alpha (JSON-lines)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--seed", type=int, default=None, help="Seed per la scelta dei primi")
    common.add_argument("--long-run", action="store_true", help="Abilita i controlli su matrici grandi")
    common.add_argument("--config", default=None, help="File di configurazione JSON")
    common.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(prog="fatpoint", description="Costanti di Waldschmidt di k-configurazioni")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", parents=[common], help="Dimensione di [I_Z]_d")
    _add_input_arguments(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--mult", type=int, default=1)
    p.set_defaults(handler=cmd_dims)

    p = sub.add_parser("alpha", parents=[common], help="Grado iniziale della potenza simbolica")
    _add_input_arguments(p)
    p.add_argument("--t", type=int, default=1)
    p.set_defaults(handler=cmd_alpha)

    p = sub.add_parser("waldschmidt", parents=[common], help="Successione, intervallo e forma chiusa")
    _add_input_arguments(p)
    p.add_argument("--t-max", type=int, default=4)
    p.add_argument("--m-max", type=int, default=0)
    p.set_defaults(handler=cmd_waldschmidt)

    p = sub.add_parser("certificate", parents=[common], help="Certificato di vuotezza in grado m·d-1")
    p.add_argument("--type")
    p.add_argument("--generic-seed", type=int, default=None)
    p.add_argument("--mu", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--output", help="Scrive il certificato in questo file")
    p.add_argument("--verify-only", help="Rigioca un certificato salvato")
    p.set_defaults(handler=cmd_certificate)

    p = sub.add_parser("table", parents=[common], help="Riproduce il catalogo delle costanti")
    p.add_argument("--b-max", type=int, default=None)
    p.add_argument("--c-max", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--budget", type=float, default=None, help="Secondi per tipo")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-write", action="store_true", help="Non scrive i file di rapporto")
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("basis", parents=[common], help="Base di [I_Z]_d (coefficienti graded-lex)")
    _add_input_arguments(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--mult", type=int, default=1)
    p.set_defaults(handler=cmd_basis)

    p = sub.add_parser("demo", parents=[common], help="Due k-configurazioni di tipo (1,2,3) a confronto")
    p.add_argument("--t-max", type=int, default=3)
    p.set_defaults(handler=cmd_demo)

    p = sub.add_parser("cache", parents=[common], help="Gestione della cache alpha")
    p.add_argument("action", choices=["stats", "clear", "compact"])
    p.set_defaults(handler=cmd_cache)
    return parser


def _build_context(args: argparse.Namespace) -> CliContext:
    config_path = args.config or os.getenv("FATPOINT_CONFIG") or "config/config.json"
    config = ConfigManager(config_path)

    level_name = args.log_level or config.get("log_level", "INFO")
    LoggingConfigurator.setup_logging(
        log_dir=config.get("log_directory", "logs"),
        log_level=getattr(logging, str(level_name).upper(), logging.INFO),
        disable_console=config.get("disable_console_logging", True) and args.log_level is None,
    )
    set_result_cache_size(config.get("result_cache_size", 2048))

    policy = RankPolicy.from_config(config)
    if args.primes is not None:
        if args.primes < 1:
            raise ValueError("--primes deve essere >= 1")
        policy = dataclasses.replace(policy, num_primes=args.primes)
    if args.seed is not None:
        policy = dataclasses.replace(policy, prime_seed=args.seed)

    cache = None
    if config.get("cache_enabled", True) and not args.no_cache:
        path = args.cache or os.getenv("FATPOINT_CACHE") or config.get("cache_path", "data/alpha_cache.jsonl")
        cache = AlphaCache(path)

    if args.degree_cap is not None and args.degree_cap < 0:
        raise ValueError("--degree-cap deve essere >= 0")
    return CliContext(config, policy, cache, ReportWriter(config_manager=config), args.format,
                      args.degree_cap, args.long_run)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse esce con 2 sugli errori e con 0 per --help
        return EXIT_OK if e.code in (0, None) else EXIT_MALFORMED

    handler: Callable[[argparse.Namespace, CliContext], int] = args.handler
    try:
        ctx = _build_context(args)
        return handler(args, ctx)
    except (SchemeFileError, GeometryError, ValueError) as e:
        logger.error("Input non valido: %s", e)
        print(f"errore: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except Exception as e:
        logger.critical("Errore inatteso nel comando %s: %s", args.command, e, exc_info=True)
        return EXIT_ERROR
