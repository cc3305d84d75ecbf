import math

import numpy as np
import pytest

from shl.expr import PotentialSyntaxError, parse_potential


def test_quadratic_with_caret_power():
    V = parse_potential("x^2/2")
    xs = np.array([0.0, 1.0, -2.0])
    assert np.allclose(V._v(xs), xs**2 / 2.0)
    assert np.allclose(V._dv(xs), xs)
    assert V.beta == pytest.approx(1.0, rel=1e-6)


def test_python_power_also_accepted():
    # sup |V''| = 28 on the (-3, 3) smoothness spot-check window
    V = parse_potential("x**4/4 + x**2/2", beta=28.0)
    assert V._dv(np.array([1.0]))[0] == pytest.approx(2.0)
    assert V.beta == 28.0


def test_trig_perturbation():
    V = parse_potential("x^2/2 + 0.1*sin(x)", beta=1.1)
    assert V.beta == 1.1
    x = np.array([0.4])
    assert V._v(x)[0] == pytest.approx(0.08 + 0.1 * math.sin(0.4))
    assert V._dv(x)[0] == pytest.approx(0.4 + 0.1 * math.cos(0.4))


def test_beta_sampled_from_curvature_when_omitted():
    V = parse_potential("x^2/2 + 0.1*sin(x)")
    # sup |V''| = sup |1 - 0.1 sin x| = 1.1
    assert V.beta == pytest.approx(1.1, rel=1e-4)


def test_constant_curvature_floor():
    # a linear potential has zero curvature; beta falls back to the floor
    V = parse_potential("2*x", beta=None)
    assert 0.0 < V.beta <= 1e-6


def test_scalar_evaluation_broadcasts():
    V = parse_potential("exp(x)")
    out = V._v(np.array([0.0, 1.0]))
    assert out.shape == (2,)
    assert out[1] == pytest.approx(math.e)


@pytest.mark.parametrize(
    "bad",
    [
        "log(x)",
        "sqrt(x)",
        "y^2",
        "x + __import__('os')",
        "sin(x) + tan(x)",
        "abs(x)",
    ],
)
def test_rejected_expressions(bad):
    with pytest.raises(PotentialSyntaxError):
        parse_potential(bad)


def test_rejection_message_lists_grammar():
    with pytest.raises(PotentialSyntaxError, match="outside the grammar"):
        parse_potential("log(x)")


def test_unparseable_text():
    with pytest.raises(PotentialSyntaxError, match="could not parse"):
        parse_potential("x +* 2")


def test_sampled_beta_tracks_extreme_curvature():
    # finite but huge curvature is sampled as-is from the window edge
    V = parse_potential("exp(x)")
    assert V.beta == pytest.approx(math.exp(20.0), rel=1e-6)


def test_overflowing_curvature_needs_explicit_beta():
    with pytest.raises(PotentialSyntaxError, match="beta"):
        parse_potential("exp(exp(x))")  # curvature overflows the sample window


def test_declared_beta_checked_against_expression():
    with pytest.raises(ValueError, match="declared beta"):
        parse_potential("exp(x)", beta=5.0)  # e^x is not 5-smooth near 3


def test_parsed_potential_is_grid_compatible():
    from shl.fokker_planck import solve_transition_density

    V = parse_potential("x^2/2")
    field = solve_transition_density(V, 0.0, 0.5)
    assert field.values.max() > 0.0
