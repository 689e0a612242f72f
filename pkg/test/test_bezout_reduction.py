import dataclasses
import json

import pytest

from src.bezout_reduction import (
    BezoutExcess,
    Inconclusive,
    LineExcess,
    ReductionCertificate,
    ReductionStep,
    TerminalReason,
    bezout_fixed_check,
    certificate_from_dict,
    certificate_id,
    certificate_to_dict,
    emptiness_certificate,
    mu_fixed_multiplicity,
    reduce_by_component,
    verify_certificate,
)
from src.linear_systems import LinearSystemQuery, dim_linear_system
from src.plane_geometry import (
    CurveComponent,
    FatPointScheme,
    KConfigType,
    Line,
    PolyCurve,
    ProjPoint,
    build_recipe,
    standard_k_config,
)

SIX_GENERAL = [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0), ProjPoint.of(0, 0, 1),
               ProjPoint.of(1, 1, 1), ProjPoint.of(1, 2, 3), ProjPoint.of(1, 3, 7)]


def _one_five_six(mult):
    return FatPointScheme.uniform(standard_k_config(KConfigType.of(1, 5, 6)), mult)


@pytest.mark.parametrize("mults, d, expected", [
    ((1, 1), 1, 1),
    ((8,) * 6, 21, 6),
    ((3, 3, 3), 9, 0),
    ((2, 2), 5, 0),
])
def test_mu_fixed_multiplicity(mults, d, expected):
    assert mu_fixed_multiplicity(mults, d) == expected


def test_mu_fixed_needs_two_points():
    with pytest.raises(ValueError):
        mu_fixed_multiplicity((5,), 1)


def test_reduce_by_line():
    scheme = _one_five_six(8)
    residual, degree = reduce_by_component(scheme, 21, Line.of(0, 0, 1), 5)
    assert degree == 16
    on_line = [m for p, m in residual.supports if p.coords[2] == 0]
    assert on_line == [3] * 6
    assert residual.multiplicity(ProjPoint.of(1, 0, 2)) == 8


def test_reduce_drops_points_reaching_zero():
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 1), (ProjPoint.of(1, 0, 1), 2)))
    residual, degree = reduce_by_component(scheme, 3, Line.of(0, 1, 0), 2)
    assert residual.is_empty()
    assert degree == 1


def test_reduce_rejects_too_many_copies():
    with pytest.raises(ValueError):
        reduce_by_component(_one_five_six(1), 2, Line.of(0, 0, 1), 3)


def test_bezout_fixed_check_on_conic():
    # x0*x2 - x1^2 passa per [1:0:0], [1:1:1], [1:2:4], [1:3:9], [0:0:1]
    conic = PolyCurve.from_coefficients(2, [0, 0, 1, -1, 0, 0])
    points = [ProjPoint.of(1, 0, 0), ProjPoint.of(1, 1, 1), ProjPoint.of(1, 2, 4), ProjPoint.of(1, 3, 9),
              ProjPoint.of(0, 0, 1)]
    scheme = FatPointScheme.uniform(points, 1)
    step = bezout_fixed_check(scheme, 2, conic)
    assert step.forced_multiplicity == 1
    assert step.justification == BezoutExcess(5, 4)
    assert bezout_fixed_check(scheme, 3, conic) is None


def test_certificate_one_five_six():
    scheme = _one_five_six(8)
    hints = build_recipe(KConfigType.of(1, 5, 6)).components
    cert = emptiness_certificate(scheme, 21, hints)
    assert isinstance(cert, ReductionCertificate)
    assert cert.terminal_reason == TerminalReason.POINT_EXCEEDS_DEGREE
    assert cert.steps[0].forced_multiplicity == 6
    assert cert.steps[0].justification == LineExcess(6, 48, 21)
    assert verify_certificate(cert)


@pytest.mark.slow
def test_certificate_one_five_six_agrees_with_rank():
    assert dim_linear_system(LinearSystemQuery(_one_five_six(8), 21)).dimension == 0


def test_certificate_without_hints_uses_pair_lines():
    scheme = FatPointScheme.uniform(standard_k_config(KConfigType.of(3, 4, 5)), 2)
    cert = emptiness_certificate(scheme, 5)
    assert isinstance(cert, ReductionCertificate)
    assert verify_certificate(cert)
    assert all(isinstance(s.justification, LineExcess) for s in cert.steps)


def test_residual_empty_by_count():
    cert = emptiness_certificate(FatPointScheme.uniform(SIX_GENERAL, 1), 2)
    assert cert.terminal_reason == TerminalReason.RESIDUAL_EMPTY_BY_COUNT
    assert cert.steps == ()
    assert verify_certificate(cert)


def test_nonempty_system_is_inconclusive():
    scheme = FatPointScheme(((ProjPoint.of(1, 0, 0), 1),))
    trace = emptiness_certificate(scheme, 1)
    assert isinstance(trace, Inconclusive)
    assert trace.residual_degree == 1
    document = certificate_to_dict(trace)
    assert document["terminal_reason"] == "Inconclusive"
    with pytest.raises(ValueError):
        certificate_from_dict(document)


def test_residual_cap_makes_trace_inconclusive():
    trace = emptiness_certificate(FatPointScheme.uniform(SIX_GENERAL, 1), 2, max_residual_entries=10)
    assert isinstance(trace, Inconclusive)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        emptiness_certificate(FatPointScheme(()), -1)


def test_tampered_certificates_are_rejected():
    cert = emptiness_certificate(_one_five_six(8), 21, build_recipe(KConfigType.of(1, 5, 6)).components)
    assert not verify_certificate(dataclasses.replace(cert, final_degree=cert.final_degree + 1))

    first = cert.steps[0]
    inflated = ReductionStep(first.component.with_multiplicity(7), 7, first.justification)
    assert not verify_certificate(dataclasses.replace(cert, steps=(inflated,) + cert.steps[1:]))

    assert not verify_certificate(dataclasses.replace(cert, steps=cert.steps[:-1]))
    assert not verify_certificate(dataclasses.replace(cert, terminal_reason=TerminalReason.DEGREE_EXHAUSTED))


def test_wrong_justification_kind_is_rejected():
    cert = emptiness_certificate(FatPointScheme.uniform(standard_k_config(KConfigType.of(3, 4, 5)), 2), 5)
    first = cert.steps[0]
    swapped = ReductionStep(first.component, first.forced_multiplicity, BezoutExcess(10, 5))
    assert not verify_certificate(dataclasses.replace(cert, steps=(swapped,) + cert.steps[1:]))


def test_certificate_document_reloads():
    cert = emptiness_certificate(_one_five_six(8), 21, build_recipe(KConfigType.of(1, 5, 6)).components)
    document = json.loads(json.dumps(certificate_to_dict(cert)))
    reloaded = certificate_from_dict(document)
    assert reloaded == cert
    assert certificate_id(reloaded) == certificate_id(cert)
    assert verify_certificate(reloaded)
    assert document["steps"][0]["justification"]["kind"] == "LineExcess"


def test_polynomial_component_serialization():
    conic = PolyCurve.from_coefficients(2, [0, 0, 1, -1, 0, 0])
    points = [ProjPoint.of(1, 0, 0), ProjPoint.of(1, 1, 1), ProjPoint.of(1, 2, 4), ProjPoint.of(1, 3, 9),
              ProjPoint.of(0, 0, 1)]
    scheme = FatPointScheme.uniform(points, 1)
    cert = emptiness_certificate(scheme, 1, hints=(CurveComponent(conic, 1),))
    assert cert.terminal_reason == TerminalReason.DEGREE_EXHAUSTED
    assert cert.overflow_step.justification == BezoutExcess(5, 2)
    assert verify_certificate(certificate_from_dict(certificate_to_dict(cert)))
