import math

import pytest

from sbx_effcap.channel import LinkBudget, SbxParams
from sbx_effcap.effcap import effective_capacity_exact
from sbx_effcap.errors import ParameterDomainError
from sbx_effcap.oracle import (
    ec_monte_carlo,
    ec_quadrature,
    ergodic_capacity_mc,
    expectation_quadrature,
)
from sbx_effcap.specfun import EvalControl

BASE = SbxParams(2.0, 2.0, 10.0, 10.0)
LB10 = LinkBudget(10.0)


@pytest.mark.parametrize("p", [BASE, SbxParams(0.5, 2, 0.5, 2), SbxParams(0.7, 1, 10, 5),
                               SbxParams(5, 2, 10, 2)])
@pytest.mark.parametrize("g", [0.1, 10.0, 1000.0])
def test_expectation_in_unit_interval(p, g):
    e = expectation_quadrature(p, LinkBudget(g), 1.0)
    assert 0.0 < e <= 1.0


def test_quadrature_stable_under_refinement():
    coarse = ec_quadrature(BASE, LB10, 1.0, EvalControl(quad_nodes=64))
    fine = ec_quadrature(BASE, LB10, 1.0, EvalControl(quad_nodes=1024))
    assert fine == pytest.approx(coarse, rel=1e-9)


def test_singular_density_handled():
    p = SbxParams(0.5, 2.0, 2.0, 2.0)
    e = effective_capacity_exact(p, LB10, 1.0).ec_bits
    assert ec_quadrature(p, LB10, 1.0) == pytest.approx(e, rel=1e-9)


def test_monte_carlo_agrees_and_scales():
    q = ec_quadrature(BASE, LB10, 1.0)
    e1 = ec_monte_carlo(BASE, LB10, 1.0, seed=1, n=200_000)
    e2 = ec_monte_carlo(BASE, LB10, 1.0, seed=1, n=400_000)
    assert abs(e1.value - q) < 3 * e1.std_err
    assert e1.std_err / e2.std_err == pytest.approx(math.sqrt(2), rel=0.1)
    assert ec_monte_carlo(BASE, LB10, 1.0, seed=1, n=200_000) == e1


def test_ergodic_capacity_bounds():
    erg = ergodic_capacity_mc(BASE, LB10, seed=3, n=200_000)
    assert erg.value <= math.log2(11.0) + 3 * erg.std_err
    assert erg.value >= ec_quadrature(BASE, LB10, 1.0) - 3 * erg.std_err
    assert ec_quadrature(BASE, LB10, 1e-4) == pytest.approx(erg.value, rel=5e-3)


def test_minimum_sample_count():
    with pytest.raises(ParameterDomainError):
        ec_monte_carlo(BASE, LB10, 1.0, seed=1, n=999)
    with pytest.raises(ParameterDomainError):
        ergodic_capacity_mc(BASE, LB10, seed=1, n=10)
