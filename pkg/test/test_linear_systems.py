import random

import pytest

from conftest import brute_force_matrix, naive_rank, oracle_dimension
from src.cache_utils import AlphaCache
from src.exact_algebra import rank, rank_multimodular
from src.linear_systems import (
    DEFAULT_POLICY,
    LinearSystemQuery,
    NotFoundBelowCap,
    RankPolicy,
    alpha,
    alpha_symbolic,
    default_degree_cap,
    dim_linear_system,
    expected_dimension,
    has_linear_component,
    interpolation_matrix,
    is_nonempty,
    lines_through_pairs,
    set_result_cache_size,
    system_basis,
)
from src.plane_geometry import (
    FatPointScheme,
    GeometryError,
    KConfigType,
    ProjPoint,
    standard_k_config,
    support_hash,
    two_line_scheme,
)

FOUR_GENERAL = [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1), ProjPoint.of(1, 1, 1)]


def _random_scheme(rng):
    pairs = {}
    for _ in range(rng.randint(1, 6)):
        coords = [rng.randint(-3, 3) for _ in range(3)]
        if not any(coords):
            continue
        pairs[ProjPoint(tuple(coords))] = (coords, rng.randint(1, 3))
    return list(pairs.items())


@pytest.mark.parametrize("seed", range(50))
def test_dimension_matches_brute_force_oracle(seed):
    rng = random.Random(seed)
    items = _random_scheme(rng)
    degree = rng.randint(0, 8)
    scheme = FatPointScheme(tuple((p, m) for p, (_, m) in items))
    result = dim_linear_system(LinearSystemQuery(scheme, degree))
    assert result.certified
    assert result.dimension == oracle_dimension([(c, m) for _, (c, m) in items], degree)
    matrix = interpolation_matrix(scheme, degree)
    oracle_rows, _ = brute_force_matrix([(c, m) for _, (c, m) in items], degree)
    expected_rank = naive_rank(oracle_rows)
    assert rank(matrix) == expected_rank
    if matrix.rows:
        assert rank_multimodular(matrix, num_primes=2, seed=seed) == expected_rank


def test_single_point_degree_one():
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 1),))
    result = dim_linear_system(LinearSystemQuery(scheme, 1))
    assert result.dimension == 2
    assert result.expected_dimension == 2
    assert result.superabundance == 0


def test_empty_scheme_has_all_forms():
    result = dim_linear_system(LinearSystemQuery(FatPointScheme(()), 3))
    assert result.dimension == 10
    assert result.method == "no-conditions"


def test_multiplicity_above_degree_is_empty():
    scheme = FatPointScheme(((ProjPoint.of(1, 2, 3), 4),))
    result = dim_linear_system(LinearSystemQuery(scheme, 3))
    assert result.dimension == 0
    assert result.certified


def test_collinear_double_points_are_superabundant():
    scheme = FatPointScheme(tuple((ProjPoint.of(1, j, 0), 2) for j in range(3)))
    result = dim_linear_system(LinearSystemQuery(scheme, 3))
    assert result.expected_dimension == 1
    assert result.dimension == 3
    assert result.superabundance == 2


def test_negative_degree_rejected():
    with pytest.raises(GeometryError):
        LinearSystemQuery(FatPointScheme(()), -1)


def test_two_line_scheme_curve():
    scheme = two_line_scheme(2)
    result = dim_linear_system(LinearSystemQuery(scheme, 2))
    assert result.dimension == 1


@pytest.mark.parametrize("b", [2, 3, 4])
def test_two_line_scheme_has_no_pair_line_component(b):
    scheme = two_line_scheme(b)
    basis = system_basis(LinearSystemQuery(scheme, b))
    assert len(basis) == 1
    assert has_linear_component(basis[0], lines_through_pairs(scheme.points)) == []


def test_has_linear_component_finds_factor():
    scheme = FatPointScheme(tuple((ProjPoint.of(1, j, 0), 2) for j in range(3)))
    basis = system_basis(LinearSystemQuery(scheme, 3))
    for curve in basis:
        assert has_linear_component(curve, lines_through_pairs(scheme.points))


def test_is_nonempty():
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 1),))
    assert is_nonempty(scheme, 0) == (False, True)
    assert is_nonempty(scheme, 1) == (True, True)
    assert is_nonempty(scheme, -1) == (False, True)


def test_alpha_four_general_double_points():
    scheme = FatPointScheme.uniform(FOUR_GENERAL, 2)
    assert alpha(scheme, 6) == 4
    assert alpha(scheme, 3) == NotFoundBelowCap(3)


def test_alpha_rejects_cap_below_multiplicity():
    with pytest.raises(ValueError):
        alpha(FatPointScheme.uniform(FOUR_GENERAL, 3), 2)


def test_alpha_hint_gives_same_value():
    scheme = FatPointScheme.uniform(FOUR_GENERAL, 2)
    assert alpha(scheme, 6, hint=4) == 4
    # un suggerimento sbagliato non cambia il risultato
    assert alpha(scheme, 6, hint=5) == 4


def test_alpha_of_empty_scheme_is_zero():
    assert alpha(FatPointScheme(()), 3) == 0


@pytest.mark.parametrize("degrees, t, expected, hint", [
    ((1, 2, 6), 2, 5, None),
    ((1, 2), 1, 2, None),
    ((1, 4, 5), 6, 16, 16),
    ((1, 2, 5), 7, 17, 17),
    ((1, 2, 4), 3, 7, None),
    ((1, 2, 4), 6, 14, 14),
    ((2, 3, 4), 6, 17, 17),
])
def test_alpha_of_standard_configurations(degrees, t, expected, hint):
    points = standard_k_config(KConfigType.of(*degrees))
    assert alpha_symbolic(points, t, hint=hint) == expected


@pytest.mark.slow
def test_alpha_one_five_six():
    points = standard_k_config(KConfigType.of(1, 5, 6))
    assert alpha_symbolic(points, 8, hint=22) == 22
    assert not is_nonempty(FatPointScheme.uniform(points, 8), 21)[0]


def test_alpha_symbolic_uses_persistent_cache(alpha_cache):
    points = standard_k_config(KConfigType.of(1, 2))
    assert alpha_symbolic(points, 1, cache=alpha_cache) == 2
    reloaded = AlphaCache(alpha_cache.path)
    assert reloaded.get(support_hash(points), 1) == 2
    assert alpha_symbolic(points, 1, cache=reloaded) == 2
    assert reloaded.hits == 2


def test_alpha_symbolic_rejects_non_positive_t():
    with pytest.raises(ValueError):
        alpha_symbolic(FOUR_GENERAL, 0)


def test_multimodular_path_is_uncertified():
    # 15 colonne, oltre la soglia razionale forzata a 10
    policy = RankPolicy(rational_column_cutoff=10)
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 1),))
    result = dim_linear_system(LinearSystemQuery(scheme, 4), policy)
    assert result.dimension == 14
    assert not result.certified
    assert result.method == "multimodular"


def test_zero_dimension_is_certified_without_bareiss():
    policy = RankPolicy(rational_column_cutoff=0)
    scheme = FatPointScheme.uniform(FOUR_GENERAL, 2)
    result = dim_linear_system(LinearSystemQuery(scheme, 3), policy)
    assert result.dimension == 0
    assert result.certified


def test_numpy_path_agrees():
    policy = RankPolicy(numpy_column_threshold=5)
    scheme = FatPointScheme.uniform(FOUR_GENERAL, 2)
    assert dim_linear_system(LinearSystemQuery(scheme, 4), policy).dimension == \
        dim_linear_system(LinearSystemQuery(scheme, 4), DEFAULT_POLICY).dimension


def test_expected_dimension():
    scheme = FatPointScheme.uniform(FOUR_GENERAL, 2)
    assert expected_dimension(scheme, 4) == 15 - 12


def test_result_cache_size_validated():
    with pytest.raises(ValueError):
        set_result_cache_size(0)
    set_result_cache_size(2048)


def test_default_degree_cap_counts_multiplicities():
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 20),))
    assert default_degree_cap(scheme) == 80
    assert default_degree_cap(FatPointScheme.uniform(FOUR_GENERAL, 2), factor=1) == 8
    assert default_degree_cap(FatPointScheme(())) == 1


def test_cached_alpha_above_cap_is_not_found(alpha_cache):
    points = standard_k_config(KConfigType.of(2, 3))
    assert alpha_symbolic(points, 3, cache=alpha_cache) == 6
    assert alpha_symbolic(points, 3, degree_cap=4, cache=alpha_cache) == NotFoundBelowCap(4)
    assert alpha_symbolic(points, 3, degree_cap=6, cache=alpha_cache) == 6
