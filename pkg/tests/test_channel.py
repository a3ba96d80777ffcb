import math

import numpy as np
import pytest
from scipy import integrate, stats

from sbx_effcap.channel import (
    LinkBudget,
    SbxParams,
    _draw_r2,
    db_to_linear,
    derived_constants,
    moment1,
    moment2,
    normalization_c,
    pdf_envelope,
    pdf_snr,
    sample_snr,
    validate,
)
from sbx_effcap.errors import ParameterDomainError
from sbx_effcap.oracle import expectation_quadrature

BASE = SbxParams(2.0, 2.0, 10.0, 10.0)


def test_validate_accepts_boundary_and_reference_sets():
    assert validate(BASE) is BASE
    validate(SbxParams(0.5, 1.0, 0.5, 1.0))


@pytest.mark.parametrize("p,rule", [(SbxParams(0.0, 1, 1, 1), "m_x >= 0.5"),
                                    (SbxParams(1, 1, 0.4, 1), "m_y >= 0.5"),
                                    (SbxParams(1, 0, 1, 1), "omega_x > 0"),
                                    (SbxParams(1, 1, 1, -2), "omega_y > 0"),
                                    (SbxParams(math.nan, 1, 1, 1), "m_x >= 0.5")])
def test_validate_names_the_violated_rule(p, rule):
    with pytest.raises(ParameterDomainError) as exc:
        validate(p)
    assert exc.value.invariant == rule


def test_link_budget_rejects_nonpositive_snr():
    with pytest.raises(ParameterDomainError):
        LinkBudget(0.0)
    assert LinkBudget.from_db(10.0).gamma_bar == pytest.approx(10.0)
    assert db_to_linear(-10.0) == pytest.approx(0.1)


def test_normalization_c_is_total_mean_power():
    # multipath power plus mean LOS power
    assert normalization_c(BASE) == pytest.approx(12.0, rel=1e-12)
    assert normalization_c(SbxParams(1.0, 1.0, 1e4, 1.0)) == pytest.approx(2.0, rel=1e-2)


def test_normalization_c_matches_sampled_mean_square_envelope():
    r2 = _draw_r2(BASE, np.random.default_rng(7), 10**6)
    se = r2.std(ddof=1) / math.sqrt(r2.size)
    assert abs(r2.mean() - normalization_c(BASE)) < 3 * se


def test_derived_constants_consistency():
    for g in (0.1, 1.0, 10.0, 1e4):
        dc = derived_constants(BASE, LinkBudget(g))
        assert dc.z_arg == pytest.approx(dc.beta * dc.w_frac, rel=1e-15)
        assert dc.z_arg < dc.beta
        assert 0.0 < dc.w_frac < 1.0


def test_pdf_envelope_zero_and_normalization():
    assert pdf_envelope(SbxParams(1.0, 2.0, 3.0, 2.0), 0.0) == 0.0
    assert pdf_envelope(SbxParams(0.5, 2.0, 3.0, 2.0), 0.0) > 0.0
    total, _ = integrate.quad(lambda r: pdf_envelope(BASE, r), 0, np.inf, epsabs=1e-12, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_pdf_envelope_matches_sampler_histogram():
    r = np.sqrt(_draw_r2(BASE, np.random.default_rng(11), 10**6))
    edges = np.quantile(np.sqrt(_draw_r2(BASE, np.random.default_rng(12), 10**5)),
                        np.linspace(0, 1, 51))
    edges[0], edges[-1] = 0.0, np.inf
    counts, _ = np.histogram(r, edges)
    probs = np.array([integrate.quad(lambda x: pdf_envelope(BASE, x), lo, hi)[0]
                      for lo, hi in zip(edges[:-1], edges[1:])])
    expected = probs * r.size
    assert np.all(np.abs(counts - expected) <= 3.0 * np.sqrt(expected * (1 - probs)) + 1)


def test_pdf_snr_at_zero_depends_on_mx():
    lb = LinkBudget(10.0)
    assert pdf_snr(BASE, lb, 0.0) == 0.0
    assert math.isinf(pdf_snr(SbxParams(0.5, 2, 10, 10), lb, 0.0))
    p1 = SbxParams(1.0, 2, 10, 10)
    assert pdf_snr(p1, lb, 0.0) == pytest.approx(pdf_snr(p1, lb, 1e-12), rel=1e-9)
    with pytest.raises(ParameterDomainError):
        pdf_snr(BASE, lb, -1.0)


def test_pdf_snr_normalized_with_unit_mean():
    lb = LinkBudget(10.0)
    assert expectation_quadrature(BASE, lb, 0.0) == pytest.approx(1.0, abs=1e-8)
    mean, _ = integrate.quad(lambda g: g * pdf_snr(BASE, lb, g), 0, np.inf, epsrel=1e-12,
                             limit=200)
    assert mean == pytest.approx(10.0, rel=1e-8)


def test_mean_identity_on_random_sets():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = SbxParams(*rng.uniform(0.5, 10, 1), *rng.uniform(0.1, 20, 1),
                      *rng.uniform(0.5, 10, 1), *rng.uniform(0.1, 20, 1))
        g = 10 ** rng.uniform(-2, 4)
        assert moment1(p, LinkBudget(g)) == pytest.approx(g, rel=1e-12)


def test_moment2_matches_quadrature_and_jensen():
    lb = LinkBudget(1.0)
    m2, _ = integrate.quad(lambda g: g * g * pdf_snr(BASE, lb, g), 0, np.inf, epsrel=1e-12,
                           limit=200)
    assert moment2(BASE, lb) == pytest.approx(m2, rel=1e-6)
    assert moment2(BASE, lb) >= moment1(BASE, lb) ** 2


def test_rayleigh_limit():
    p = SbxParams(1.0, 1.0, 1e4, 1e-12)
    lb = LinkBudget(3.0)
    assert moment2(p, lb) == pytest.approx(2 * 9.0, rel=1e-2)
    g = sample_snr(p, lb, seed=5, n=10**6)
    assert stats.kstest(g / 3.0, "expon").statistic < 0.002


def test_sampler_mean_and_pdf_agreement():
    lb = LinkBudget(10.0)
    g = sample_snr(BASE, lb, seed=2024, n=10**6)
    assert abs(g.mean() - 10.0) < 3 * g.std(ddof=1) / 1e3
    edges = np.quantile(sample_snr(BASE, lb, seed=99, n=10**5), np.linspace(0, 1, 51))
    edges[0], edges[-1] = 0.0, np.inf
    counts, _ = np.histogram(g, edges)
    probs = np.array([integrate.quad(lambda x: pdf_snr(BASE, lb, x), lo, hi, limit=200)[0]
                      for lo, hi in zip(edges[:-1], edges[1:])])
    _, pvalue = stats.chisquare(counts, probs / probs.sum() * g.size)
    assert pvalue > 1e-3


def test_sampler_determinism_and_sharding():
    lb = LinkBudget(10.0)
    a = sample_snr(BASE, lb, seed=1, n=1001, shards=3)
    b = sample_snr(BASE, lb, seed=1, n=1001, shards=3)
    assert a.tobytes() == b.tobytes()
    assert a.size == 1001
    assert not np.array_equal(a, sample_snr(BASE, lb, seed=2, n=1001, shards=3))
    with pytest.raises(ParameterDomainError):
        sample_snr(BASE, lb, seed=1, n=0)
