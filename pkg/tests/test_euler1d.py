import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitstab.euler1d import (
    GAMMA,
    DensityWaveVariant,
    EulerConfig,
    EulerDissipation,
    EulerSemidisc,
    FilterSpec,
    as_components,
    check_admissible,
    conservative,
    dudw,
    ec_condition_residual,
    entropy_density,
    entropy_variables,
    euler_ec_flux,
    euler_residual,
    physical_flux,
    pressure,
    density_wave_scenario,
)
from splitstab.fluxes import FluxDomainError
from splitstab.operators import assemble_grid, build_circulant, build_csbp
from splitstab.semidisc import ConfigError
from splitstab.timeint import positivity_filter, rk4

RNG = np.random.default_rng(5)


def random_states(n):
    return conservative(RNG.uniform(0.01, 3.0, n), RNG.uniform(-2.0, 2.0, n), RNG.uniform(0.01, 30.0, n))


state = st.tuples(
    st.floats(1e-3, 10.0), st.floats(-5.0, 5.0), st.floats(1e-3, 50.0)
).map(lambda t: conservative(*t)[:, None])


def test_identical_states_give_physical_flux():
    u = random_states(50)
    assert np.allclose(euler_ec_flux(u, u), physical_flux(u), rtol=1e-13, atol=1e-13)
    c = conservative(1.2, 0.3, 4.0)[:, None]
    assert np.allclose(euler_ec_flux(c, c), physical_flux(c), rtol=1e-14)


def test_entropy_condition_residual_random_pairs():
    ul, ur = random_states(2000), random_states(2000)
    r = ec_condition_residual(ul, ur)
    scale = np.maximum(1.0, np.abs(ur[1]) + np.abs(ul[1]))
    assert np.max(np.abs(r) / scale) < 1e-11


@settings(max_examples=200, deadline=None)
@given(state, state)
def test_flux_symmetry_and_near_equal_states(ul, ur):
    f1 = euler_ec_flux(ul, ur)
    f2 = euler_ec_flux(ur, ul)
    assert np.allclose(f1, f2, rtol=1e-13, atol=1e-13)
    near = ul * (1 + 1e-9)
    assert np.allclose(euler_ec_flux(ul, near), physical_flux(ul), rtol=1e-8, atol=1e-10)


def test_entropy_variables_are_gradient_of_entropy():
    u = random_states(5)
    w = entropy_variables(u)
    for k in range(3):
        du = np.zeros_like(u)
        du[k] = 1e-6 * np.maximum(1.0, np.abs(u[k]))
        fd = (entropy_density(u + du) - entropy_density(u - du)) / (2 * du[k])
        assert np.allclose(w[k], fd, rtol=1e-6, atol=1e-8)


def test_dudw_symmetric_positive_definite_and_inverse_hessian():
    u = random_states(6)
    b = dudw(u)
    assert np.allclose(b, np.swapaxes(b, -1, -2))
    assert np.all(np.linalg.eigvalsh(b) > 0)
    # dW/dU by finite differences times dU/dW is the identity
    for i in range(u.shape[1]):
        jac = np.zeros((3, 3))
        for k in range(3):
            du = np.zeros(3)
            du[k] = 1e-6 * max(1.0, abs(u[k, i]))
            jac[:, k] = (entropy_variables((u[:, i] + du)[:, None]) - entropy_variables((u[:, i] - du)[:, None]))[:, 0] / (2 * du[k])
        assert np.allclose(jac @ b[i], np.eye(3), atol=1e-5)


def test_admissibility_errors():
    u = conservative(np.array([1.0, -0.1, 1.0]), 0.0, 1.0)
    with pytest.raises(FluxDomainError) as exc:
        check_admissible(u)
    assert exc.value.index == 1 and "density" in str(exc.value)
    u = conservative(np.ones(3), 0.0, np.array([1.0, 1.0, -2.0]))
    with pytest.raises(FluxDomainError, match="pressure"):
        check_admissible(u)
    with pytest.raises(FluxDomainError):
        euler_ec_flux(u, u)


def test_constant_state_zero_residual():
    for g in (assemble_grid((-1, 1), 1, build_circulant(8, 39)), assemble_grid((-1, 1), 3, build_csbp(2, 12))):
        u = np.repeat(conservative(0.7, 0.4, 3.0)[:, None], g.n, axis=1)
        r = euler_residual(g, EulerConfig(), u)
        assert np.max(np.abs(r)) < 1e-11
        r = EulerSemidisc(g, EulerConfig(dissipation=EulerDissipation(2, 0.1, "entropy"))).residual(u.ravel())
        assert np.max(np.abs(r)) < 1e-11


def test_semidisc_matches_dense_flux_differencing():
    g = assemble_grid((-1, 1), 1, build_circulant(4, 12))
    u = random_states(12)
    ref = np.zeros_like(u)
    for i in range(12):
        for j in range(12):
            if g.d_mat[i, j] != 0:
                ref[:, i] -= 2 * g.d_mat[i, j] * euler_ec_flux(u[:, [i]], u[:, [j]])[:, 0]
    assert np.allclose(EulerSemidisc(g).residual(u), ref, rtol=1e-12, atol=1e-10)


@pytest.mark.parametrize("multiblock", [False, True])
def test_entropy_rate_vanishes_without_dissipation(multiblock):
    g = assemble_grid((-1, 1), 3, build_csbp(2, 12)) if multiblock else assemble_grid((-1, 1), 1, build_circulant(8, 39))
    u = conservative(1 + 0.5 * np.sin(np.pi * g.x), 0.3 + 0.1 * np.cos(np.pi * g.x), 5 + np.sin(2 * np.pi * g.x))
    sd = EulerSemidisc(g)
    r = sd.residual(u)
    assert abs(np.sum(entropy_variables(u) * r * g.h_diag)) < 1e-10
    assert np.max(np.abs(sd.totals(r))) < 1e-10


@pytest.mark.parametrize("variable", ["conservative", "entropy"])
def test_dissipation_conserves_and_dissipates_entropy(variable):
    g = assemble_grid((-1, 1), 1, build_circulant(8, 39))
    u = conservative(1 + 0.5 * np.sin(np.pi * g.x), 0.2, 5 + np.sin(3 * np.pi * g.x))
    sd = EulerSemidisc(g, EulerConfig(dissipation=EulerDissipation(2, 0.05, variable)))
    d = sd.dissipation(u)
    assert np.max(np.abs(sd.totals(d))) < 1e-12
    if variable == "entropy":
        assert np.sum(entropy_variables(u) * d * g.h_diag) < 0


def test_density_wave_setup_and_exact_solution():
    sc = density_wave_scenario("plain")
    assert sc.grid.n == 39 and sc.dt == 1e-4
    rho = as_components(sc.u0)[0]
    assert np.min(rho) == pytest.approx(0.02, abs=2e-3)
    assert np.allclose(pressure(sc.u0), 20.0)
    assert np.allclose(sc.exact(0.0), sc.u0)
    shifted = sc.exact(20.0)  # one full transit of the periodic domain at v = 0.1
    assert np.allclose(shifted, sc.u0, atol=1e-12)
    assert density_wave_scenario("filter").config.filter == FilterSpec()


def test_one_step_conserves_totals():
    sc = density_wave_scenario("plain")
    sd = sc.semidisc()
    tr = rk4(sd.residual, sc.u0.ravel(), (0.0, sc.dt), sc.dt)
    assert np.allclose(sd.totals(tr.final_state), sd.totals(sc.u0), rtol=0, atol=1e-12)


def test_entropy_drift_short_run():
    sc = density_wave_scenario("plain")
    sd = sc.semidisc()
    tr = rk4(sd.residual, sc.u0.ravel(), (0.0, 0.1), sc.dt)
    assert abs(sd.total_entropy(tr.final_state) - sd.total_entropy(sc.u0)) < 1e-8


def test_entropy_dissipation_variant_entropy_nonincreasing():
    sc = density_wave_scenario("entropy_dissipation")
    sd = sc.semidisc()
    tr = rk4(sd.residual, sc.u0.ravel(), (0.0, 0.02), sc.dt, channels={"S": lambda t, u: sd.total_entropy(u)})
    assert np.all(np.diff(tr.channels["S"]) <= 1e-12)


def test_filter_acts_on_density_and_pressure_only():
    g = assemble_grid((-1, 1), 1, build_circulant(8, 39))
    sd = EulerSemidisc(g, EulerConfig(filter=FilterSpec()))
    rho = np.full(g.n, 1.0)
    rho[4] = 1e-3
    p = np.full(g.n, 2.0)
    p[7] = -1e-3
    u = np.stack([rho, rho * 0.3, p / (GAMMA - 1) + 0.5 * rho * 0.09])
    f = sd.post_step(u)
    assert np.array_equal(f[1], u[1])
    assert f[0][4] == positivity_filter(1e-3)
    assert pressure(f)[7] == pytest.approx(positivity_filter(-1e-3), rel=1e-12)
    assert np.allclose(np.delete(f, [4, 7], axis=1), np.delete(u, [4, 7], axis=1), rtol=1e-15)
    assert EulerSemidisc(g).post_step(u) is u


def test_relative_entropy_zero_at_reference_and_positive_elsewhere():
    sc = density_wave_scenario("plain")
    sd = sc.semidisc()
    assert sd.relative_entropy(sc.u0, sc.u0) == 0.0
    assert sd.relative_entropy(sc.exact(0.3), sc.u0) > 0


def test_config_errors():
    with pytest.raises(ConfigError):
        FilterSpec(0.1, 0.05)
    with pytest.raises(ConfigError):
        EulerConfig(gamma=1.0)
    with pytest.raises(ConfigError):
        EulerDissipation(0, 1.0)
    with pytest.raises(ConfigError):
        EulerSemidisc(assemble_grid((0, 1), 1, build_csbp(1, 10), periodic=False))
    assert set(DensityWaveVariant) == {
        DensityWaveVariant.PLAIN,
        DensityWaveVariant.CONSERVATIVE_DISSIPATION,
        DensityWaveVariant.ENTROPY_DISSIPATION,
        DensityWaveVariant.FILTER,
    }
