import numpy as np
import pytest
from scipy.integrate import quad

from wcebridge.basis import SineBasis
from wcebridge.indices import enumerate_full, enumerate_table_a
from wcebridge.models import (
    GeometricBrownianMotion,
    LogisticSde,
    OrnsteinUhlenbeck,
    ProteinKinetics,
    make_model,
)
from wcebridge.propagator import TimeGrid, solve_propagator


def solve(model, p=2, L=3, N=1000, method="rk4", scheme="full"):
    iset = enumerate_full(p, L) if scheme == "full" else enumerate_table_a(p, L)
    basis = SineBasis(1.0, max(L, 1))
    return solve_propagator(model, iset, basis, TimeGrid(1.0, N), method=method)


def test_ou_zero_mode_closed_form():
    sol = solve(OrnsteinUhlenbeck(x0=0.8, a=0.5, sigma=1.0))
    assert sol.values[0, -1] == pytest.approx(0.4852245277701068, abs=1e-6)  # x0 e^{-a}
    np.testing.assert_allclose(sol.values[0], 0.8 * np.exp(-0.5 * sol.grid.nodes), atol=1e-9)


def test_ou_singleton_closed_form():
    # oracle: sigma e^{-at} int_0^t e^{as} e_1(s) ds with the analytic antiderivative
    a = 0.5
    b = np.pi
    integral = (np.e**a * (a * np.sin(b) - b * np.cos(b)) + b) / (a * a + b * b)
    oracle = np.exp(-a) * np.sqrt(2.0) * integral
    assert oracle == pytest.approx(0.7053267474464922, rel=1e-12)  # frozen
    ref, _ = quad(lambda s: np.exp(a * s) * np.sqrt(2) * np.sin(np.pi * s), 0, 1, epsabs=1e-13)
    assert np.exp(-a) * ref == pytest.approx(oracle, rel=1e-10)

    sol = solve(OrnsteinUhlenbeck(x0=0.8, a=0.5, sigma=1.0))
    r = sol.index_set.position(sol.index_set[1])  # e_1 row
    assert sol.index_set[r].support == (1,)
    assert sol.values[r, -1] == pytest.approx(oracle, abs=1e-8)


def test_ou_higher_orders_vanish():
    sol = solve(OrnsteinUhlenbeck(x0=0.8, a=0.5, sigma=1.0), p=3, L=3)
    orders = np.asarray(sol.index_set.orders)
    assert np.max(np.abs(sol.values[orders >= 2])) == 0.0


def test_gbm_zero_mode_closed_form():
    sol = solve(GeometricBrownianMotion(x0=1.0, a=0.2, sigma=0.3))
    assert sol.values[0, -1] == pytest.approx(1.2214027581601699, abs=1e-8)  # e^{0.2}
    np.testing.assert_allclose(sol.values[0], np.exp(0.2 * sol.grid.nodes), atol=1e-9)


def test_gbm_driftless_singleton_is_basis_antiderivative():
    # with a = 0 the singleton reduces to sigma x0 int_0^t e_1
    sol = solve(GeometricBrownianMotion(x0=1.0, a=0.0, sigma=1.0), p=1, L=1)
    expected = np.sqrt(2.0) * (1.0 - np.cos(np.pi * sol.grid.nodes)) / np.pi
    np.testing.assert_allclose(sol.values[1], expected, atol=1e-10)


@pytest.mark.parametrize(
    "model",
    [
        OrnsteinUhlenbeck(x0=0.8, a=0.5, sigma=0.0),
        GeometricBrownianMotion(x0=1.0, a=0.2, sigma=0.0),
        LogisticSde(x0=0.2, a=0.5, sigma=0.0),
        ProteinKinetics(x0=0.3, lam=0.4, sigma=0.0),
    ],
)
def test_zero_diffusion_kills_stochastic_modes(model):
    sol = solve(model, p=3, L=3)
    orders = np.asarray(sol.index_set.orders)
    assert np.max(np.abs(sol.values[orders >= 1])) < 1e-12


def test_logistic_zero_mode_closed_form():
    sol = solve(LogisticSde(x0=0.1, a=0.5, sigma=0.7))
    t = sol.grid.nodes
    expected = 1.0 / (1.0 + (0.9 / 0.1) * np.exp(-0.5 * t))
    np.testing.assert_allclose(sol.values[0], expected, atol=1e-8)
    assert sol.values[0, -1] == pytest.approx(0.15482809896025465, abs=1e-8)


def test_logistic_constant_when_flat():
    sol = solve(LogisticSde(x0=0.37, a=0.0, sigma=0.0))
    np.testing.assert_array_equal(sol.values[0], np.full(sol.grid.N + 1, 0.37))


def test_protein_zero_mode_linear_limit():
    # lam = 0, sigma = 0: dX0/dt = 1 - X0, so X0(t) = 1 + (x0 - 1) e^{-t}
    sol = solve(ProteinKinetics(x0=0.8, lam=0.0, sigma=0.0))
    assert sol.values[0, -1] == pytest.approx(0.9264241117657115, abs=1e-9)


def test_protein_fixed_point_at_one():
    sol = solve(ProteinKinetics(x0=1.0, lam=0.7, sigma=0.0))
    np.testing.assert_allclose(sol.values[0], 1.0, atol=1e-12)


def test_protein_forcing_vanishes_at_levels_zero_and_one():
    model = ProteinKinetics(x0=0.5, lam=0.3, sigma=0.8)
    zero_mask = np.zeros(3)
    values = np.array([0.0, 1.0, 0.5])
    out = model.diffusion(values, zero_mask)
    assert out[0] == 0.0 and out[1] == 0.0 and out[2] == pytest.approx(0.8 * 0.25)


def test_protein_ito_correction_switch():
    paper = ProteinKinetics(x0=0.5, lam=0.3, sigma=0.8)
    half = ProteinKinetics(x0=0.5, lam=0.3, sigma=0.8, ito_correction="half-sigma-squared")
    zm = np.array([1.0])
    x = np.array([0.4])
    # paper form: 1 + (lam+s-1)x - (lam+3s)x^2 + 2sx^3 with s = sigma
    s = 0.8
    expect_paper = 1 + (0.3 + s - 1) * 0.4 - (0.3 + 3 * s) * 0.16 + 2 * s * 0.064
    s2 = 0.5 * 0.8**2
    expect_half = 1 + (0.3 + s2 - 1) * 0.4 - (0.3 + 3 * s2) * 0.16 + 2 * s2 * 0.064
    assert paper.drift(x, zm)[0] == pytest.approx(expect_paper, rel=1e-14)
    assert half.drift(x, zm)[0] == pytest.approx(expect_half, rel=1e-14)
    with pytest.raises(ValueError):
        ProteinKinetics(x0=0.5, ito_correction="bogus")


def test_gbm_order_scaling_in_sigma():
    # order-n coefficients scale like sigma^n: halving sigma scales them 2^n
    full = solve(GeometricBrownianMotion(x0=1.0, a=0.2, sigma=0.3), p=3, L=3, N=400)
    half = solve(GeometricBrownianMotion(x0=1.0, a=0.2, sigma=0.15), p=3, L=3, N=400)
    orders = np.asarray(full.index_set.orders)
    for n in (1, 2, 3):
        rows = orders == n
        num = np.linalg.norm(full.values[rows, -1])
        den = np.linalg.norm(half.values[rows, -1])
        assert num / den == pytest.approx(2.0**n, rel=0.05)


def test_make_model_factory():
    m = make_model("ou", 0.5, a=0.7, sigma=2.0)
    assert isinstance(m, OrnsteinUhlenbeck) and m.a == 0.7
    with pytest.raises(ValueError):
        make_model("heat-equation", 0.0)
    with pytest.raises(ValueError):
        make_model("gbm", 1.0, sigma=-1.0)
