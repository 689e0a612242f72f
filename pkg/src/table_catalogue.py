"""
Catalogo delle costanti di Waldschmidt note per le k-configurazioni standard
di lunghezza <= 3: condizioni sui parametri, valore chiuso, coppia (mu, d)
usata dal criterio di stabilizzazione e ricetta della curva F.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple, Union

from src.plane_geometry import (
    CurveRecipe,
    KConfigType,
    recipe_b_plus_one,
    recipe_conic_234,
    recipe_curve_2b,
    recipe_curves_2b_minus_1,
    recipe_curves_2b_minus_2,
    recipe_curves_2b_plus_1,
    recipe_even_c,
    recipe_odd_c,
    recipe_pencil,
    recipe_row_union,
    recipe_stable_c,
)

RowValue = Union[Fraction, Tuple[Fraction, Fraction]]


class CatalogueConsistencyError(RuntimeError):
    """Un tipo corrisponde a più righe del catalogo."""


@dataclass(frozen=True)
class TableRow:
    key: str
    pattern: str
    note: str
    guard: Callable[[KConfigType], bool]
    value: Callable[[KConfigType], RowValue]
    source: str
    pair: Optional[Callable[[KConfigType], Tuple[int, int]]] = None
    recipe: Optional[Callable[[KConfigType], CurveRecipe]] = None
    recipe_exact: Optional[Callable[[KConfigType], bool]] = None
    any_configuration: bool = False
    subset: Optional[Callable[[KConfigType], Optional[KConfigType]]] = None

    @property
    def has_recipe(self) -> bool:
        return self.recipe is not None

    @property
    def is_interval(self) -> bool:
        return self.pair is None

    def instantiate(self, t: KConfigType) -> Tuple[int, int]:
        """Coppia (mu, d) del risultato, non necessariamente ridotta."""
        if self.pair is None:
            raise ValueError(f"La riga {self.key} non ha una coppia (mu, d)")
        return self.pair(t)


def _three(t: KConfigType) -> Tuple[int, int, int]:
    a, b, c = t.degrees
    return a, b, c


def _one_bc(t: KConfigType) -> bool:
    return t.length == 3 and t.degrees[0] == 1


def _b(t: KConfigType) -> int:
    return t.degrees[1] if t.length >= 2 else t.degrees[0]


def _two_three(t: KConfigType, c_test: Callable[[int], bool]) -> bool:
    return t.length == 3 and t.degrees[:2] == (2, 3) and c_test(t.degrees[2])


def _c(t: KConfigType) -> int:
    return t.degrees[2]


def _sq(b: int) -> int:
    return b * b


_ROWS: List[TableRow] = [
    TableRow(
        "a", "(a)", "any a",
        guard=lambda t: t.length == 1,
        value=lambda t: Fraction(1),
        source="single-line",
        pair=lambda t: (1, 1),
        recipe=lambda t: recipe_row_union(t),
        recipe_exact=lambda t: False,
        any_configuration=True,
    ),
    TableRow(
        "1,b", "(1,b)", "b >= 2",
        guard=lambda t: t.length == 2 and t.degrees[0] == 1,
        value=lambda t: Fraction(2 * _b(t) - 1, _b(t)),
        source="point-pencil",
        pair=lambda t: (_b(t), 2 * _b(t) - 1),
        recipe=lambda t: recipe_pencil(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "a,b", "(a,b)", "a >= 2",
        guard=lambda t: t.length == 2 and t.degrees[0] >= 2,
        value=lambda t: Fraction(2),
        source="disjoint-lines",
        pair=lambda t: (1, 2),
        recipe=lambda t: recipe_row_union(t),
        recipe_exact=lambda t: False,
        any_configuration=True,
    ),
    TableRow(
        "1,b,b+1", "(1,b,b+1)", "b even, b >= 4",
        guard=lambda t: _one_bc(t) and _c(t) == _b(t) + 1 and _b(t) % 2 == 0 and _b(t) >= 4,
        value=lambda t: Fraction(9 * _b(t) - 4, 3 * _b(t)),
        source="rows-and-joins",
        pair=lambda t: (3 * _b(t) // 2, (9 * _b(t) - 4) // 2),
        recipe=lambda t: recipe_b_plus_one(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,c-even", "(1,b,c)", "c even, c <= 2b-4",
        guard=lambda t: _one_bc(t) and _c(t) % 2 == 0 and _c(t) <= 2 * _b(t) - 4,
        value=lambda t: Fraction(6 * _b(t) + 3 * _c(t) - 4, 2 * _b(t) + _c(t)),
        source="rows-and-joins",
        pair=lambda t: ((2 * _b(t) + _c(t)) // 2, (6 * _b(t) + 3 * _c(t) - 4) // 2),
        recipe=lambda t: recipe_even_c(_b(t), _c(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,c-odd", "(1,b,c)", "c odd, b+1 < c <= 2b-3",
        guard=lambda t: _one_bc(t) and _c(t) % 2 == 1 and _b(t) + 1 < _c(t) <= 2 * _b(t) - 3,
        value=lambda t: Fraction(6 * _b(t) + 3 * _c(t) - 7, 2 * _b(t) + _c(t) - 1),
        source="rows-and-joins, subset (1,b,c-1)",
        pair=lambda t: ((2 * _b(t) + _c(t) - 1) // 2, (6 * _b(t) + 3 * _c(t) - 7) // 2),
        recipe=lambda t: recipe_odd_c(_b(t), _c(t)),
        recipe_exact=lambda t: False,
        subset=lambda t: KConfigType.of(1, _b(t), _c(t) - 1),
    ),
    TableRow(
        "1,b,2b-2", "(1,b,2b-2)", "b > 2",
        guard=lambda t: _one_bc(t) and _c(t) == 2 * _b(t) - 2 and _b(t) > 2,
        value=lambda t: Fraction(6 * _sq(_b(t)) - 14 * _b(t) + 6, 2 * _sq(_b(t)) - 4 * _b(t) + 1),
        source="kernel-curves, Bezout",
        pair=lambda t: (2 * _sq(_b(t)) - 4 * _b(t) + 1, 6 * _sq(_b(t)) - 14 * _b(t) + 6),
        recipe=lambda t: recipe_curves_2b_minus_2(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,2b-1", "(1,b,2b-1)", "b >= 2 (b = 2 degenerate)",
        guard=lambda t: _one_bc(t) and _c(t) == 2 * _b(t) - 1,
        value=lambda t: Fraction(6 * _sq(_b(t)) - 8 * _b(t) + 1, 2 * _sq(_b(t)) - 2 * _b(t)),
        source="kernel-curves, Bezout",
        pair=lambda t: (2 * _sq(_b(t)) - 2 * _b(t), 6 * _sq(_b(t)) - 8 * _b(t) + 1),
        recipe=lambda t: recipe_curves_2b_minus_1(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,2b", "(1,b,2b)", "b >= 2",
        guard=lambda t: _one_bc(t) and _c(t) == 2 * _b(t),
        value=lambda t: Fraction(6 * _b(t) - 5, 2 * _b(t) - 1),
        source="kernel-curve, Bezout",
        pair=lambda t: (2 * _b(t) - 1, 6 * _b(t) - 5),
        recipe=lambda t: recipe_curve_2b(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,2b+1", "(1,b,2b+1)", "b >= 2",
        guard=lambda t: _one_bc(t) and _c(t) == 2 * _b(t) + 1,
        value=lambda t: Fraction(6 * _sq(_b(t)) - 2 * _b(t) - 3, 2 * _sq(_b(t)) - 1),
        source="kernel-curves, Bezout",
        pair=lambda t: (2 * _sq(_b(t)) - 1, 6 * _sq(_b(t)) - 2 * _b(t) - 3),
        recipe=lambda t: recipe_curves_2b_plus_1(_b(t)),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "1,b,c>=2b+2", "(1,b,c)", "c >= 2b+2",
        guard=lambda t: _one_bc(t) and _c(t) >= 2 * _b(t) + 2,
        value=lambda t: Fraction(3 * _b(t) - 1, _b(t)),
        source="rows-and-joins, spread subset",
        pair=lambda t: (_b(t), 3 * _b(t) - 1),
        recipe=lambda t: recipe_stable_c(_b(t), _c(t)),
        recipe_exact=lambda t: False,
    ),
    TableRow(
        "2,3,4", "(2,3,4)", "",
        guard=lambda t: _two_three(t, lambda c: c == 4),
        value=lambda t: Fraction(17, 6),
        source="lines and conic",
        pair=lambda t: (6, 17),
        recipe=lambda t: recipe_conic_234(),
        recipe_exact=lambda t: True,
    ),
    TableRow(
        "2,3,5", "(2,3,5)", "interval only",
        guard=lambda t: _two_three(t, lambda c: c == 5),
        value=lambda t: (Fraction(17, 6), Fraction(71, 24)),
        source="subset (2,3,4); degree-71 curve",
        subset=lambda t: KConfigType.of(2, 3, 4),
    ),
    TableRow(
        "2,3,c>=6", "(2,3,c)", "c >= 6",
        guard=lambda t: _two_three(t, lambda c: c >= 6),
        value=lambda t: Fraction(3),
        source="tripled rows, subset (2,3,6)",
        pair=lambda t: (3, 9) if _c(t) == 6 else (1, 3),
        recipe=lambda t: recipe_row_union(t, 3, True) if _c(t) == 6 else recipe_row_union(t),
        recipe_exact=lambda t: _c(t) == 6,
        subset=lambda t: None if _c(t) == 6 else KConfigType.of(2, 3, 6),
    ),
    TableRow(
        "2,b>=4,c", "(2,b,c)", "b >= 4",
        guard=lambda t: t.length == 3 and t.degrees[0] == 2 and _b(t) >= 4,
        value=lambda t: Fraction(3),
        source="doubled rows, subset (2,4,5)",
        pair=lambda t: (2, 6) if t.degrees == (2, 4, 5) else (1, 3),
        recipe=lambda t: recipe_row_union(t, 2, True) if t.degrees == (2, 4, 5) else recipe_row_union(t),
        recipe_exact=lambda t: t.degrees == (2, 4, 5),
        subset=lambda t: None if t.degrees == (2, 4, 5) else KConfigType.of(2, 4, 5),
    ),
    TableRow(
        "a>=3,b,c", "(a,b,c)", "a >= 3",
        guard=lambda t: t.length == 3 and t.degrees[0] >= 3,
        value=lambda t: Fraction(3),
        source="disjoint-lines",
        pair=lambda t: (1, 3),
        recipe=lambda t: recipe_row_union(t),
        recipe_exact=lambda t: False,
        any_configuration=True,
    ),
]


def table_rows() -> List[TableRow]:
    """Le sedici righe del catalogo, nell'ordine di confronto."""
    return list(_ROWS)


def match_rows(t: KConfigType) -> List[TableRow]:
    return [row for row in _ROWS if row.guard(t)]


def match_row(t: KConfigType) -> Optional[TableRow]:
    """Riga del tipo, None se non catalogato; più righe sono un errore interno."""
    rows = match_rows(t)
    if len(rows) > 1:
        raise CatalogueConsistencyError(f"Il tipo {t} corrisponde a più righe: {[r.key for r in rows]}")
    return rows[0] if rows else None


def subset_witness(t: KConfigType) -> Optional[KConfigType]:
    """Tipo la cui configurazione standard è contenuta in quella di t e dà il limite inferiore."""
    row = match_row(t)
    if row is None or row.subset is None:
        return None
    return row.subset(t)


def is_degenerate(t: KConfigType) -> bool:
    """(1,2,3): le curve del nucleo degenerano in rette."""
    return t.degrees == (1, 2, 3)


def enumerate_types(b_max: int, c_max: int) -> List[KConfigType]:
    """Tipi di lunghezza <= 3 con d2 <= b_max e d3 <= c_max (d1 <= b_max per lunghezza 1)."""
    types = [KConfigType.of(a) for a in range(1, b_max + 1)]
    types += [KConfigType.of(a, b) for b in range(2, b_max + 1) for a in range(1, b)]
    types += [
        KConfigType.of(a, b, c)
        for b in range(2, b_max + 1)
        for a in range(1, b)
        for c in range(b + 1, c_max + 1)
    ]
    return types


def step_function_pairs(b_max: int, c_max: int) -> List[Tuple[KConfigType, KConfigType]]:
    """Coppie (1,b,c), (1,b,c+1) con c pari <= 2b-4: stessa costante."""
    pairs = []
    for b in range(2, b_max + 1):
        for c in range(b + 1, min(2 * b - 4, c_max - 1) + 1):
            if c % 2 == 0:
                pairs.append((KConfigType.of(1, b, c), KConfigType.of(1, b, c + 1)))
    return pairs
