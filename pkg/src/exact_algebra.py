"""
Aritmetica esatta: razionali a precisione arbitraria, campi primi e rango/nucleo
di matrici dense. Tutti i conteggi di dimensione del motore passano da qui.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import nextprime

logger = logging.getLogger(__name__)

# Valori razionali: i valori interi restano int, gli altri Fraction (sempre ridotti)
Rational = Union[int, Fraction]

PRIME_FLOOR = 2 ** 60
PRIME_CEILING = 2 ** 62
# Primi per il kernel vettoriale: p^2 < 2^62 entra in int64
SMALL_PRIME_FLOOR = 2 ** 30
SMALL_PRIME_CEILING = 2 ** 31 - 1


class MixedFieldError(ValueError):
    """Matrice con elementi su campi diversi."""


class DimensionMismatchError(ValueError):
    """Forme incompatibili (righe irregolari, vettore di lunghezza errata)."""


class PrimeSelectionError(RuntimeError):
    """Nessun primo utilizzabile trovato entro il numero massimo di tentativi."""


class Residue(NamedTuple):
    """Residuo modulo un primo p, in [0, p)."""
    value: int
    modulus: int

    @classmethod
    def of(cls, value: int, modulus: int) -> "Residue":
        return cls(value % modulus, modulus)


def to_rational(value) -> Rational:
    """
    Converte int, Fraction o stringa "num/den" in un razionale esatto.
    I float sono rifiutati: nessun valore approssimato entra nel motore.
    """
    if isinstance(value, bool):
        raise ValueError("Valore booleano non ammesso come scalare")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return parse_rational(value)
    raise ValueError(f"Scalare non esatto o di tipo non supportato: {value!r}")


def parse_rational(text: str) -> Rational:
    """Interpreta "n" oppure "n/d" (d != 0)."""
    try:
        parsed = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Razionale non valido: {text!r}") from e
    if "." in text or "e" in text.lower():
        raise ValueError(f"Razionale in notazione decimale non ammesso: {text!r}")
    return parsed.numerator if parsed.denominator == 1 else parsed


def format_rational(value: Rational) -> str:
    """Serializza sempre come "num/den"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class ExactMatrix:
    """
    Matrice densa immutabile, elementi in ordine row-major.
    modulus None significa razionali; altrimenti residui in [0, modulus).
    """
    rows: int
    cols: int
    entries: Tuple
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError("Dimensioni negative")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"Attesi {self.rows * self.cols} elementi, trovati {len(self.entries)}"
            )
        if self.modulus is None:
            if not all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in self.entries):
                raise MixedFieldError("Elementi non razionali in una matrice razionale")
        else:
            p = self.modulus
            if not all(isinstance(x, int) and 0 <= x < p for x in self.entries):
                raise MixedFieldError(f"Elementi fuori da [0, {p}) in una matrice modulare")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None,
                  modulus: Optional[int] = None) -> "ExactMatrix":
        """
        Costruisce la matrice da righe. Il campo si deduce dagli elementi:
        Residue con lo stesso modulo -> campo primo, altrimenti razionali.
        Elementi di campi diversi sollevano MixedFieldError.
        """
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise DimensionMismatchError("Numero di colonne non deducibile da una matrice senza righe")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise DimensionMismatchError("Righe di lunghezza diversa")

        flat = [x for r in rows for x in r]
        residues = [x for x in flat if isinstance(x, Residue)]
        if residues:
            if len(residues) != len(flat):
                raise MixedFieldError("Residui modulari mescolati a razionali")
            moduli = {x.modulus for x in residues}
            if len(moduli) != 1 or (modulus is not None and moduli != {modulus}):
                raise MixedFieldError(f"Moduli diversi nella stessa matrice: {sorted(moduli)}")
            p = moduli.pop()
            return cls(len(rows), cols, tuple(x.value % p for x in residues), p)

        if modulus is not None:
            return cls(len(rows), cols, tuple(_residue_of(to_rational(x), modulus) for x in flat), modulus)
        return cls(len(rows), cols, tuple(to_rational(x) for x in flat))

    @classmethod
    def identity(cls, n: int, modulus: Optional[int] = None) -> "ExactMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                             cols=n, modulus=modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: Optional[int] = None) -> "ExactMatrix":
        return cls(rows, cols, (0,) * (rows * cols), modulus)

    @property
    def is_rational(self) -> bool:
        return self.modulus is None

    def row(self, i: int) -> Tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        t = tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows))
        return ExactMatrix(self.cols, self.rows, t, self.modulus)

    def mul_vector(self, v: Sequence) -> List:
        if len(v) != self.cols:
            raise DimensionMismatchError(f"Vettore di lunghezza {len(v)}, attesa {self.cols}")
        out = [sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows)]
        if self.modulus is not None:
            return [x % self.modulus for x in out]
        return [to_rational(Fraction(x)) for x in out]

    def cleared_rows(self) -> Tuple[List[List[int]], List[int]]:
        """
        Righe razionali moltiplicate ciascuna per il mcm dei denominatori.
        Restituisce (righe intere, moltiplicatori). Il rango non cambia.
        """
        if self.modulus is not None:
            return self.to_rows(), [1] * self.rows
        out, multipliers = [], []
        for i in range(self.rows):
            row = self.row(i)
            scale = lcm(*(x.denominator for x in row)) if row else 1
            if scale == 1:
                out.append([int(x) for x in row])
            else:
                out.append([int(x * scale) for x in row])
            multipliers.append(scale)
        return out, multipliers


def _residue_of(value: Rational, p: int) -> int:
    value = Fraction(value)
    if value.denominator % p == 0:
        raise MixedFieldError(f"Il denominatore {value.denominator} non è invertibile modulo {p}")
    return value.numerator * pow(value.denominator, -1, p) % p


# ---------------------------------------------------------------------------
# Eliminazione
# ---------------------------------------------------------------------------

def bareiss_rank(int_rows: Iterable[Sequence[int]], ncols: int) -> int:
    """
    Rango di una matrice intera con eliminazione fraction-free (Bareiss).
    Pivot: primo elemento non nullo in ordine di colonna; le divisioni sono esatte.
    """
    a = [list(r) for r in int_rows if any(r)]
    m = len(a)
    r, prev = 0, 1
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        pv = pr[c]
        tail = pr[c + 1:]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                row[c + 1:] = [(pv * x - f * y) // prev for x, y in zip(row[c + 1:], tail)]
            else:
                row[c + 1:] = [(pv * x) // prev for x in row[c + 1:]]
            row[c] = 0
        prev = pv
        r += 1
    return r


def modular_rank(int_rows: Iterable[Sequence[int]], ncols: int, p: int) -> int:
    """Rango modulo p con eliminazione gaussiana ordinaria (interi Python)."""
    a = [[x % p for x in r] for r in int_rows]
    a = [r for r in a if any(r)]
    m = len(a)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        pr = [x * inv % p for x in a[r][c:]]
        a[r][c:] = pr
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                row[c:] = [(x - f * y) % p for x, y in zip(row[c:], pr)]
        r += 1
    return r


def modular_rank_numpy(int_rows: Iterable[Sequence[int]], ncols: int, p: int) -> int:
    """
    Rango modulo un primo p < 2^31 con aggiornamenti vettoriali numpy (int64).
    Usato per matrici molto grandi.
    """
    if p >= SMALL_PRIME_CEILING + 1:
        raise ValueError(f"Il kernel numpy richiede p < 2^31, ricevuto {p}")
    a = np.array([[x % p for x in r] for r in int_rows], dtype=np.int64).reshape(-1, ncols)
    m = a.shape[0]
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        below = np.flatnonzero(a[r + 1:, c]) + r + 1
        if below.size:
            factors = a[below, c][:, None]
            a[below, c:] = (a[below, c:] - (factors * a[r, c:][None, :]) % p) % p
        r += 1
    return r


def _rational_rref(int_rows: List[List[int]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    a = [[Fraction(x) for x in r] for r in int_rows if any(r)]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _modular_rref(int_rows: List[List[int]], ncols: int, p: int) -> Tuple[List[List[int]], List[int]]:
    a = [[x % p for x in r] for r in int_rows]
    a = [r for r in a if any(r)]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _primitive_integer_vector(v: List[Fraction]) -> Tuple[int, ...]:
    scale = lcm(*(x.denominator for x in v))
    ints = [int(x * scale) for x in v]
    content = 0
    for x in ints:
        content = gcd(content, x)
    ints = [x // content for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def rank(M: ExactMatrix) -> int:
    """
    Rango di M sul suo campo: Bareiss sui razionali (dopo aver eliminato i
    denominatori riga per riga), eliminazione ordinaria sui campi primi.
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.modulus is None:
        int_rows, _ = M.cleared_rows()
        return bareiss_rank(int_rows, M.cols)
    return modular_rank(M.to_rows(), M.cols, M.modulus)


def kernel_basis(M: ExactMatrix) -> List[Tuple]:
    """
    Base del nucleo destro di M: cols - rank(M) vettori.

    Sui razionali ogni vettore ha elementi interi, contenuto 1 e primo
    elemento non nullo positivo. Sui campi primi i vettori sono residui con 1
    nella variabile libera.
    """
    if M.cols == 0:
        return []
    if M.modulus is None:
        int_rows, _ = M.cleared_rows()
        reduced, pivots = _rational_rref(int_rows, M.cols)
        zero, one = Fraction(0), Fraction(1)
    else:
        reduced, pivots = _modular_rref(M.to_rows(), M.cols, M.modulus)
        zero, one = 0, 1

    pivot_set = set(pivots)
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        v = [zero] * M.cols
        v[free] = one
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[free] if M.modulus is None else (-row[free]) % M.modulus
        if M.modulus is None:
            basis.append(_primitive_integer_vector(v))
        else:
            basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# Percorso multimodulare
# ---------------------------------------------------------------------------

def draw_prime(rng: random.Random, small: bool = False, working_degree: int = 0) -> int:
    """Primo casuale: > 2^60 (o in (2^30, 2^31) per il kernel numpy) e > 2·grado."""
    floor, ceiling = (SMALL_PRIME_FLOOR, SMALL_PRIME_CEILING) if small else (PRIME_FLOOR, PRIME_CEILING)
    floor = max(floor, 2 * working_degree + 1)
    while True:
        p = int(nextprime(rng.randrange(floor, ceiling)))
        if p < ceiling:
            return p


def modular_ranks(int_rows: List[List[int]], ncols: int, multipliers: Sequence[int],
                  num_primes: int, seed: Optional[int] = None, small: bool = False,
                  working_degree: int = 0, stop_at_full: bool = False) -> List[Tuple[int, int]]:
    """
    Calcola il rango modulo num_primes primi distinti. Un primo che divide un
    moltiplicatore di riga viene scartato e sostituito.

    Con stop_at_full=True si interrompe al primo primo che dà rango pieno sulle colonne.
    :return: lista di coppie (primo, rango)
    """
    rng = random.Random(seed)
    max_attempts = 8 * num_primes + 8
    results: List[Tuple[int, int]] = []
    attempts = 0
    while len(results) < num_primes:
        if attempts >= max_attempts:
            raise PrimeSelectionError(
                f"Impossibile trovare {num_primes} primi validi dopo {attempts} tentativi"
            )
        attempts += 1
        p = draw_prime(rng, small=small, working_degree=working_degree)
        if any(q == p for q, _ in results):
            continue
        if any(mult % p == 0 for mult in multipliers):
            logger.warning("Il primo %d divide un denominatore eliminato, nuovo tentativo", p)
            continue
        if small:
            r = modular_rank_numpy(int_rows, ncols, p)
        else:
            r = modular_rank(int_rows, ncols, p)
        logger.debug("Rango modulo %d: %d", p, r)
        results.append((p, r))
        if stop_at_full and r == ncols:
            break
    return results


def rank_multimodular(M: ExactMatrix, num_primes: int, seed: Optional[int] = None,
                      working_degree: int = 0) -> int:
    """
    Massimo dei ranghi modulo num_primes primi casuali > 2^60.
    È sempre un limite inferiore certificato del rango razionale.
    """
    if M.modulus is not None:
        raise MixedFieldError("rank_multimodular richiede una matrice razionale")
    if num_primes < 1:
        raise ValueError("num_primes deve essere >= 1")
    if M.rows == 0 or M.cols == 0:
        return 0
    int_rows, multipliers = M.cleared_rows()
    results = modular_ranks(int_rows, M.cols, multipliers, num_primes, seed=seed,
                            working_degree=working_degree)
    return max(r for _, r in results)
