import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bottleneck_flow.errors import AssumptionViolated, DomainError
from bottleneck_flow.width import (
    WidthProfile,
    eval_dg,
    eval_dk,
    eval_g,
    eval_k,
    format_profile,
    parse_profile,
    validate,
    validate_default,
)


def test_cosine_values(cosine):
    assert eval_k(cosine, 0.0) == pytest.approx(1.3, abs=1e-15)
    assert eval_k(cosine, 0.75) == pytest.approx(0.7, abs=1e-15)
    assert eval_k(cosine, 1.0) == pytest.approx(1.0 + 0.3 * math.cos(2 * math.pi / 1.5), abs=1e-15)


def test_supergaussian_neck_value():
    p = WidthProfile.supergaussian(1.0, 0.5, 0.2, 0.6)
    assert eval_k(p, 0.6) == 0.5
    # exp(-(0.6/0.2)^6) underflows far below rounding: both ends are 1
    assert eval_k(p, 0.0) == 1.0
    assert eval_k(p, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_g_at_minimum_and_quarter_period(cosine):
    assert eval_g(cosine, 0.75) == pytest.approx(0.0, abs=1e-15)
    expected = -2 * math.pi * 0.3 / 1.5
    assert eval_g(cosine, 0.375) == pytest.approx(expected, rel=1e-13)
    h = 1e-6
    fd = (eval_k(cosine, 0.375 + h) - eval_k(cosine, 0.375 - h)) / (2 * h)
    assert fd / eval_k(cosine, 0.375) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize(
    "profile",
    [
        WidthProfile.cosine(0.3, 1.5),
        WidthProfile.cosine(0.7, 1.2),
        WidthProfile.supergaussian(1.0, 0.5, 0.2, 0.6),
        WidthProfile.supergaussian(1.0, 0.9, 0.2, 0.6),
    ],
    ids=["cos03", "cos07", "sg05", "sg09"],
)
def test_g_matches_log_finite_difference(profile):
    rng = np.random.default_rng(7)
    xs = rng.uniform(1e-3, 1 - 1e-3, 100)
    h = 1e-6
    fd = (np.log(eval_k(profile, xs + h)) - np.log(eval_k(profile, xs - h))) / (2 * h)
    g = eval_g(profile, xs)
    scale = np.maximum(np.abs(g), 1.0)
    assert np.max(np.abs(fd - g) / scale) < 1e-6


def test_dg_matches_finite_difference(cosine):
    xs = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    fd = (eval_g(cosine, xs + h) - eval_g(cosine, xs - h)) / (2 * h)
    assert np.allclose(eval_dg(cosine, xs), fd, rtol=1e-7, atol=1e-7)


def test_domain_errors(cosine):
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(DomainError):
            eval_k(cosine, bad)
    with pytest.raises(DomainError):
        eval_g(cosine, [0.5, 2.0])


def test_validate_cosine(cosine_info):
    i = cosine_info
    assert i.xi_star == pytest.approx(0.75, abs=1e-12)
    assert i.k_min == pytest.approx(0.7, abs=1e-15)
    assert i.k0 == pytest.approx(1.3)
    assert i.k1 == pytest.approx(0.85)
    assert i.assumption_ok and i.nondegenerate
    # g'(xi*) = k''/k = a (2 pi / b)^2 / k_min
    assert i.g_prime_at_star == pytest.approx(0.3 * (2 * math.pi / 1.5) ** 2 / 0.7, rel=1e-12)


@given(a=st.floats(0.05, 0.95), b=st.floats(1.05, 1.95))
@settings(max_examples=40, deadline=None)
def test_cosine_minimiser_is_half_period(a, b):
    info = validate(WidthProfile.cosine(a, b))
    assert abs(info.xi_star - b / 2) < 1e-10
    assert info.k_min < min(info.k0, info.k1)
    assert abs(eval_dk(WidthProfile.cosine(a, b), info.xi_star)) <= 1e-10 * a * 2 * math.pi / b


def test_validate_is_deterministic(cosine):
    assert validate(cosine) == validate(cosine)


def test_monotone_table_is_rejected():
    xi = np.linspace(0, 1, 11)
    with pytest.raises(AssumptionViolated) as exc:
        validate(WidthProfile.tabulated(xi, 1 + xi))
    assert "boundary" in str(exc.value)
    assert exc.value.diagnostic["k0"] == pytest.approx(1.0)


def test_nonpositive_width_rejected():
    with pytest.raises(AssumptionViolated):
        validate(WidthProfile.cosine(1.2, 1.5))


def test_tied_minima_rejected():
    # two equal wells at 0.25 and 0.75
    with pytest.raises(AssumptionViolated, match="tied"):
        validate(WidthProfile.cosine(0.3, 0.5))


def test_supergaussian_flat_minimum():
    p = WidthProfile.supergaussian(1.0, 0.5, 0.2, 0.6)
    with pytest.raises(AssumptionViolated, match="degenerate"):
        validate(p)
    info = validate_default(p)
    assert info.xi_star == pytest.approx(0.6, abs=1e-6)
    assert info.k_min == pytest.approx(0.5, abs=1e-15)
    assert not info.nondegenerate
    assert info.k0 == pytest.approx(1.0) and info.k1 == pytest.approx(1.0)


def test_tabulated_spline_through_cosine_samples(cosine):
    xi = np.linspace(0, 1, 201)
    tab = WidthProfile.tabulated(xi, eval_k(cosine, xi))
    info = validate(tab)
    assert info.xi_star == pytest.approx(0.75, abs=1e-6)
    assert info.k_min == pytest.approx(0.7, abs=1e-8)


def test_tabulated_input_checks():
    with pytest.raises(DomainError):
        WidthProfile.tabulated([0, 0.5, 1], [1, 0.5, 1])
    with pytest.raises(DomainError):
        WidthProfile.tabulated([0, 0.5, 0.4, 1], [1, 0.5, 0.6, 1])
    with pytest.raises(DomainError):
        WidthProfile.tabulated([0.1, 0.3, 0.5, 1], [1, 0.5, 0.6, 1])


def test_parse_profile_round_trip(tmp_path):
    p = parse_profile("cosine:a=0.3,b=1.5")
    assert p == WidthProfile.cosine(0.3, 1.5)
    assert parse_profile(format_profile(p)) == p
    sg = parse_profile("supergauss:we=1,wm=0.5,d=0.2,xi0=0.6")
    assert sg.params == (1.0, 0.5, 0.2, 0.6)
    path = tmp_path / "k.csv"
    xi = np.linspace(0, 1, 9)
    path.write_text("xi,k\n" + "".join(f"{x},{1 - 0.4 * np.sin(np.pi * x)}\n" for x in xi))
    tab = parse_profile(f"table:{path}")
    assert validate(tab).xi_star == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("spec", ["cosine:a=0.3", "cosine:a=x,b=1", "wave:a=1", "table:/no/such.csv", "supergauss:we=1"])
def test_parse_profile_errors(spec):
    with pytest.raises(DomainError):
        parse_profile(spec)
