import numpy as np
import pytest

from splitstab.jacobian import (
    Provenance,
    jac_burgers,
    jac_fd,
    jac_flux_diff,
    jac_geometric_compact,
    jac_split_form,
    jac_sym,
    jacobian_for,
    log_circulant_sym_closed_form,
)
from splitstab.operators import assemble_grid, build_circulant, build_csbp, build_lgl
from splitstab.problems import skewed_sinusoid
from splitstab.semidisc import (
    Dissipation,
    SchemeConfig,
    Semidiscretization,
    burgers_residual,
    flux_diff_residual,
    split_form_residual,
)

RNG = np.random.default_rng(7)
CSBP = assemble_grid((0, 1), 3, build_csbp(2, 12))
LGL = assemble_grid((0, 1), 4, build_lgl(3))
CIRC = assemble_grid((0, 1), 1, build_circulant(8, 21))


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_jac_fd_exact_for_linear_residual():
    m = RNG.normal(size=(6, 6))
    j = jac_fd(lambda u: m @ u, RNG.normal(size=6))
    assert np.max(np.abs(j - m)) < 1e-8


def test_jac_fd_quadratic_error_is_tiny():
    u = RNG.uniform(0.5, 1.5, CSBP.n)
    exact = jac_burgers(CSBP, 0.5, u).matrix
    assert rel_err(jac_fd(lambda v: burgers_residual(CSBP, 0.5, v), u), exact) < 1e-8


def test_jac_fd_near_small_states_richardson():
    g = CIRC
    a = np.ones(g.n)
    u = 1e-3 * RNG.uniform(1.0, 3.0, g.n)
    res = lambda v: flux_diff_residual(g, "geometric", a, v)  # noqa: E731
    exact = jac_flux_diff(g, "geometric", a, u).matrix
    coarse = jac_fd(res, u, 1e-7)
    assert rel_err(coarse, exact) < 1e-4


@pytest.mark.parametrize("grid", [CSBP, LGL, CIRC], ids=["csbp", "lgl", "circ"])
def test_split_form_matches_fd_and_is_linear(grid):
    a = skewed_sinusoid(grid.x)
    for al in (0.0, 0.5, 1.0):
        jm = jac_split_form(grid, al, a)
        assert jm.provenance is Provenance.ANALYTIC
        fd = jac_fd(lambda u: split_form_residual(grid, al, a, u), np.zeros(grid.n))
        assert np.max(np.abs(jm.matrix - fd)) < 1e-10 * np.max(np.abs(fd))


def test_alpha1_unit_speed_circulant_is_skew():
    j = jac_split_form(CIRC, 1.0, np.ones(CIRC.n)).matrix
    assert np.allclose(j, -CIRC.d_mat)
    assert np.max(np.abs(np.linalg.eigvals(j).real)) < 1e-10


@pytest.mark.parametrize("grid", [CSBP, LGL, CIRC], ids=["csbp", "lgl", "circ"])
@pytest.mark.parametrize("kind", ["central", "product", "geometric", "logarithmic"])
def test_flux_diff_jacobian_matches_fd(grid, kind):
    a = RNG.uniform(0.5, 2.0, grid.n)
    for _ in range(3):
        u = RNG.uniform(0.2, 2.0, grid.n)
        jm = jac_flux_diff(grid, kind, a, u)
        fd = jac_fd(lambda v: flux_diff_residual(grid, kind, a, v), u)
        assert rel_err(jm.matrix, fd) < 1e-6


def test_jacobian_with_upwind_and_entropy_dissipation_matches_fd():
    a = RNG.uniform(0.5, 2.0, CSBP.n)
    u = RNG.uniform(0.2, 2.0, CSBP.n)
    cfg = SchemeConfig(flux="logarithmic", sat="upwind", sigma=0.7, dissipation=Dissipation(2, 0.01, "entropy"))
    sd = Semidiscretization(CSBP, cfg, a)
    assert rel_err(sd.jacobian(u), jac_fd(sd.residual, u)) < 1e-6


def test_geometric_compact_form_periodic():
    a = RNG.uniform(0.5, 2.0, CIRC.n)
    u = RNG.uniform(0.2, 2.0, CIRC.n)
    full = jac_flux_diff(CIRC, "geometric", a, u).matrix
    assert np.max(np.abs(full - jac_geometric_compact(CIRC, a, u))) < 1e-12 * np.max(np.abs(full))


def test_constant_central_is_minus_a_d():
    j = jac_flux_diff(CIRC, "central", np.full(CIRC.n, 2.0), np.ones(CIRC.n)).matrix
    assert np.allclose(j, -2.0 * CIRC.d_mat, atol=1e-12)


def test_burgers_continuous_baseflow_is_split_form_with_a_equal_u():
    u = RNG.uniform(0.5, 1.5, CSBP.n)
    for il, ir in CSBP.interfaces:
        u[ir] = u[il]
    jb = jac_burgers(CSBP, 0.4, u).matrix
    d = CSBP.d_mat
    interior = -0.4 * d * u[None, :] - 0.6 * u[:, None] * d - 0.6 * np.diag(d @ u)
    mask = np.ones(CSBP.n, bool)
    mask[np.array(CSBP.interfaces).ravel()] = False
    assert np.allclose(jb[mask], interior[mask], atol=1e-12)
    assert np.allclose(jb.sum(axis=0) @ np.zeros(CSBP.n), 0)


def test_burgers_constant_baseflow_scales_spectrum():
    g = assemble_grid((0, 1), 1, build_circulant(4, 16))
    j1 = jac_burgers(g, 2 / 3, np.ones(16)).matrix
    j3 = jac_burgers(g, 2 / 3, np.full(16, 3.0)).matrix
    assert np.allclose(j3, 3.0 * j1)


def test_burgers_jacobian_matches_fd_and_fd_fallback():
    u = RNG.uniform(0.3, 1.5, CSBP.n)
    jm = jac_burgers(CSBP, 2 / 3, u)
    fd = jac_fd(lambda v: burgers_residual(CSBP, 2 / 3, v), u)
    assert rel_err(jm.matrix, fd) < 1e-6
    assert jac_burgers(CSBP, 2 / 3, u, sigma=1.0).provenance is Provenance.FINITE_DIFFERENCE
    sd = Semidiscretization(CSBP, SchemeConfig(equation="burgers", alpha=2 / 3, sat="upwind", sigma=1.0))
    assert jacobian_for(sd, u).provenance is Provenance.FINITE_DIFFERENCE


def test_jac_sym_weightings():
    m = RNG.normal(size=(5, 5))
    skew = m - m.T
    assert not np.any(jac_sym(skew))
    h = RNG.uniform(0.5, 1.0, 5)
    s = jac_sym(m, "hnorm", h)
    assert np.allclose(s, 0.5 * (m.T * h[None, :] + h[:, None] * m))
    with pytest.raises(ValueError):
        jac_sym(m, "hnorm")
    with pytest.raises(ValueError):
        jac_sym(m, "ahnorm", h)


@pytest.mark.parametrize("grid", [CSBP, LGL, CIRC], ids=["csbp", "lgl", "circ"])
def test_central_ah_symmetric_part_vanishes(grid):
    a = RNG.uniform(0.5, 2.0, grid.n)
    j = jac_split_form(grid, 1.0, a).matrix
    s = jac_sym(j, "ahnorm", grid.h_diag, a)
    assert np.max(np.abs(s)) < 1e-12 * np.max(np.abs(j))


def test_log_symmetric_part_closed_form():
    for _ in range(3):
        u = RNG.uniform(0.2, 2.0, CIRC.n)
        j = jac_flux_diff(CIRC, "logarithmic", np.ones(CIRC.n), u).matrix
        closed = log_circulant_sym_closed_form(CIRC, u)
        assert np.max(np.abs(closed - jac_sym(j))) < 1e-12 * np.max(np.abs(j))
    with pytest.raises(ValueError):
        log_circulant_sym_closed_form(CSBP, np.ones(CSBP.n))


@pytest.mark.parametrize("grid", [CSBP, CIRC], ids=["csbp", "circ"])
def test_sharp_geometric_structure(grid):
    """With v = W z and the baseflow moving by the scheme itself, ||z||_{aH} is constant."""
    a = RNG.uniform(0.5, 2.0, grid.n)
    u = RNG.uniform(0.2, 2.0, grid.n)
    w = np.sqrt(a * u)
    j = jac_flux_diff(grid, "geometric", a, u).matrix
    ut = flux_diff_residual(grid, "geometric", a, u)
    wt = a * ut / (2 * w)
    m = (j * w[None, :]) / w[:, None] - np.diag(wt / w)
    s = jac_sym(m, "ahnorm", grid.h_diag, a)
    z = RNG.normal(size=grid.n)
    assert abs(z @ s @ z) < 1e-11 * np.max(np.abs(m))
