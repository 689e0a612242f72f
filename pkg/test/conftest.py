import os
import sys
from fractions import Fraction
from math import comb

import pytest

# Aggiungi la directory del progetto al path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

LONG_RUN = os.getenv("FATPOINT_LONG_RUN") == "1"


def naive_rank(rows):
    """Rango con eliminazione di Gauss su Fraction, scritta indipendentemente dal motore."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    for c in range(ncols):
        pivot = None
        for i in range(rank, len(a)):
            if a[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def brute_force_matrix(points_with_mults, degree):
    """
    Condizioni di annullamento tramite derivate parziali dei monomi valutate nel
    punto: d^(i+j)/dx^i dy^j del monomio deomogeneizzato nella carta del punto.
    """
    monos = [(degree - a - b, a, b) for a in range(degree + 1) for b in range(degree + 1 - a)]
    monos.sort(reverse=True)
    rows = []
    for coords, m in points_with_mults:
        coords = [Fraction(c) for c in coords]
        k = next(i for i, c in enumerate(coords) if c != 0)
        others = [i for i in range(3) if i != k]
        u, v = coords[others[0]] / coords[k], coords[others[1]] / coords[k]
        for i in range(m):
            for j in range(m - i):
                row = []
                for e in monos:
                    eu, ev = e[others[0]], e[others[1]]
                    if eu < i or ev < j:
                        row.append(Fraction(0))
                        continue
                    fu = Fraction(_falling(eu, i)) * (u ** (eu - i) if eu - i else 1)
                    fv = Fraction(_falling(ev, j)) * (v ** (ev - j) if ev - j else 1)
                    row.append(fu * fv)
                rows.append(row)
    return rows, len(monos)


def _falling(n, k):
    out = 1
    for x in range(k):
        out *= n - x
    return out


def oracle_dimension(points_with_mults, degree):
    rows, ncols = brute_force_matrix(points_with_mults, degree)
    assert ncols == comb(degree + 2, 2)
    return ncols - naive_rank(rows)


@pytest.fixture
def long_run_only():
    if not LONG_RUN:
        pytest.skip("Imposta FATPOINT_LONG_RUN=1 per i controlli lunghi")


@pytest.fixture
def alpha_cache(tmp_path):
    from src.cache_utils import AlphaCache
    return AlphaCache(str(tmp_path / "alpha_cache.jsonl"))
