"""Benchmark problem definitions."""
import numpy as np
import pytest
from scipy.integrate import quad

from fveg.errors import CapabilityError, ConfigurationError
from fveg.evo_euler import GasParams, cons_to_prim, prim_to_cons
from fveg.grid import build_grid
from fveg.problems import (
    PROBLEM_NAMES,
    RIEMANN_STATES,
    VORTEX_P_C,
    exact_solution,
    gresho_primitive,
    make_problem,
    vortex_pressure,
    vortex_primitive,
)

GAS = GasParams(1.4)


# [PAPER] wave-sine initial phi = -(sin 2 pi x + sin 2 pi y); at (0.25, 0) it equals -1
def test_wave_initial_value():
    spec = make_problem("wave-sine")
    np.testing.assert_allclose(spec.exact(np.array(0.25), np.array(0.0), 0.0), [-1.0, 0.0, 0.0], atol=1e-15)


# [DERIVED] the exact wave solution satisfies phi_t + u_x + v_y = 0 and u_t + phi_x = v_t + phi_y = 0
def test_wave_exact_solves_pde():
    ex = make_problem("wave-sine").exact
    rng = np.random.default_rng(0)
    x, y, t = rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50), rng.uniform(0, 1, 50)
    d = 1e-5

    def dd(f, k):
        e = [0.0, 0.0, 0.0]
        e[k] = d
        return (f(x + e[0], y + e[1], t + e[2]) - f(x - e[0], y - e[1], t - e[2])) / (2 * d)

    Ux, Uy, Ut = dd(ex, 0), dd(ex, 1), dd(ex, 2)
    assert np.abs(Ut[0] + Ux[1] + Uy[2]).max() < 1e-8
    assert np.abs(Ut[1] + Ux[0]).max() < 1e-8
    assert np.abs(Ut[2] + Uy[0]).max() < 1e-8


# [PAPER] Gresho at r = 0.2: |u| = 1, p = 5 + 12.5 * 0.04 = 5.5; outside r = 0.4 at rest
def test_gresho_values():
    W = gresho_primitive(np.array(0.2), np.array(0.0))
    np.testing.assert_allclose(W, [1.0, 0.0, 1.0, 5.5], atol=1e-14)
    W = gresho_primitive(np.array(0.0), np.array(0.5))
    np.testing.assert_allclose(W, [1.0, 0.0, 0.0, 3 + 4 * np.log(2)], atol=1e-14)
    # pressure is continuous at both kinks
    for r in (0.2, 0.4):
        lo = gresho_primitive(np.array(r - 1e-12), np.array(0.0))[3]
        hi = gresho_primitive(np.array(r + 1e-12), np.array(0.0))[3]
        assert lo == pytest.approx(hi, abs=1e-9)


def _speed_and_pressure(fn, r, center=(0.0, 0.0)):
    W = fn(np.array(center[0] + r), np.array(center[1]))
    return W[0], W[2] - (1.0 if fn is vortex_primitive else 0.0), W[3]


# [DERIVED] radial momentum balance dp/dr = rho u_theta^2 / r, checked by quadrature of the right side
@pytest.mark.parametrize("fn, center, scale, rmax", [(gresho_primitive, (0, 0), 1.0, 0.6),
                                                    (vortex_primitive, (0.5, 0.5), 0.4, 0.45)])
def test_steady_vortex_radial_balance(fn, center, scale, rmax):
    def rhs(s):
        rho, ut, _ = _speed_and_pressure(fn, s, center)
        return float(rho * ut**2 / s)

    p0 = float(_speed_and_pressure(fn, 0.0, center)[2])
    breaks = [0.2, 0.4] if fn is gresho_primitive else [0.4]
    for s in np.linspace(0.01, rmax, 100):
        pts = [b for b in breaks if b < s]
        integral = quad(rhs, 0.0, s, points=pts or None, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        assert float(_speed_and_pressure(fn, s, center)[2]) - p0 == pytest.approx(integral, abs=1e-10)


# [DERIVED] vortex pressure is continuous at the vortex edge and constant outside
def test_vortex_pressure_continuity():
    assert float(vortex_pressure(1.0 - 1e-12)) == pytest.approx(VORTEX_P_C, abs=1e-12)
    assert float(vortex_pressure(1.5)) == VORTEX_P_C
    assert np.all(vortex_pressure(np.linspace(0, 1, 50)) > 0)


def test_vortex_exact_at_integer_times_only():
    spec = make_problem("traveling-vortex")
    g = spec.grid(8)
    assert spec.has_exact(1.0) and not spec.has_exact(0.5)
    np.testing.assert_allclose(exact_solution(spec, g, 1.0).data, spec.initial_field(g).data)
    with pytest.raises(CapabilityError):
        exact_solution(spec, g, 0.5)
    with pytest.raises(CapabilityError):
        exact_solution(make_problem("riemann-4shock"), g, 0.15)


# [PAPER] E1 upper-right state (0.5313, 0, 0, 0.4)
def test_riemann_states():
    spec = make_problem("riemann-4shock")
    W = cons_to_prim(spec.initial(np.array(0.75), np.array(0.75)), GAS)
    np.testing.assert_allclose(W, [0.5313, 0.0, 0.0, 0.4], atol=1e-14)
    W = cons_to_prim(make_problem("riemann-spiral").initial(np.array(0.25), np.array(0.25)), GAS)
    np.testing.assert_allclose(W, [2.0, -0.5, 0.5, 5.0], atol=1e-14)


# [DERIVED] exact area-fraction projection reproduces the closed-form integrals, also when
# the discontinuity lines cut through cells
@pytest.mark.parametrize("name", sorted(RIEMANN_STATES))
@pytest.mark.parametrize("nx", [4, 5, 7])
def test_riemann_projection_integrals(name, nx):
    spec = make_problem(name)
    f = spec.initial_field(spec.grid(nx))
    cons = [prim_to_cons(np.array(s), GAS) for s in RIEMANN_STATES[name]]
    expect = 0.25 * sum(cons)  # each quadrant has area 1/4
    np.testing.assert_allclose(f.integral(), expect, rtol=1e-13)
    if nx % 2 == 0:  # aligned grid: every cell holds a pure state
        np.testing.assert_allclose(f.data[:, -1, -1], cons[0], rtol=1e-14)


def test_problem_defaults():
    assert make_problem("wave-sine").cfl == 0.267
    assert make_problem("wave-sine").t_final == 0.1
    assert make_problem("riemann-4shock").t_final == 0.15
    assert make_problem("riemann-spiral").t_final == 0.2
    assert make_problem("gresho").domain == (-0.75, 0.75, -0.75, 0.75)
    assert make_problem("gresho", cfl=0.3).cfl == 0.3
    assert make_problem("wave-sine").grid(40).h == pytest.approx(0.05)


def test_unknown_problem_lists_names():
    with pytest.raises(ConfigurationError) as exc:
        make_problem("sod")
    for name in PROBLEM_NAMES:
        assert name in str(exc.value)


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_initial_fields_are_admissible(name):
    from fveg.problems import make_system

    spec = make_problem(name)
    f = spec.initial_field(spec.grid(16))
    assert np.all(make_system(spec).admissible(f.data))
