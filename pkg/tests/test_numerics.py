import io
import math
import random

import pytest

from chamberlab.cases import registry_case
from chamberlab.certify import minimal_line_angles
from chamberlab.errors import BoundaryError
from chamberlab.numerics import (
    CSV_HEADER,
    CurveState,
    IntegratorConfig,
    MODE_CANDIDATE,
    MODE_MINIMAL,
    geometric_scalars,
    get_lab,
    integrate_curve,
    normal_residual,
    principal_curvatures,
    state_from_angle,
    step_candidate,
    step_minimal,
)


def _random_interior_state(case, rng, radius=(0.7, 1.5)):
    sigma = rng.uniform(0.25, 0.75) * math.pi / case.d
    r = rng.uniform(*radius)
    angle = rng.uniform(0, 2 * math.pi)
    return state_from_angle(r * math.cos(sigma), r * math.sin(sigma), angle)


def test_principal_curvatures_u5_worked_point(u5):
    st = CurveState(s=0.0, x=2.0, y=1.0, xd=1.0, yd=0.0)
    ks = principal_curvatures(st, u5, kd=-1 / 3)
    assert ks[:4] == pytest.approx([-1.0, 1.0, 0.0, -1 / 3])
    assert len(ks) == u5.d + 1


def test_principal_curvature_count_matches_chamber_type(all_cases):
    rng = random.Random(1)
    for case in all_cases:
        st = _random_interior_state(case, rng)
        assert len(principal_curvatures(st, case, 0.0)) == case.d + 1


def test_principal_curvatures_reject_wall_state(u5):
    st = CurveState(s=0.0, x=1.0, y=0.0, xd=0.0, yd=1.0)
    with pytest.raises(BoundaryError):
        principal_curvatures(st, u5, 0.0)


def test_directional_log_derivative_matches_ratio_formula(all_cases):
    # First curvature formula (normal-direction derivative of log w^2 by
    # finite differences) against the direct ratio, at random states.
    rng = random.Random(2)
    h = 1e-6
    for case in all_cases:
        lab = get_lab(case)
        st = _random_interior_state(case, rng)
        ratio = lab.wall_curvatures(st)
        for i, wall in enumerate(lab.walls):
            def log_w2(x, y):
                return math.log(wall(x, y) ** 2)

            # directional derivative along nu = (-yd, xd)
            fd = (log_w2(st.x - h * st.yd, st.y + h * st.xd)
                  - log_w2(st.x + h * st.yd, st.y - h * st.xd)) / (2 * h)
            assert -0.5 * fd == pytest.approx(ratio[i], rel=1e-8, abs=1e-8)


def test_geometric_scalars_identities(su3):
    rng = random.Random(3)
    lab = get_lab(su3)
    for _ in range(10):
        st = _random_interior_state(su3, rng)
        r_val = lab.R(st.x, st.y, st.xd, st.yd)
        kd = lab.mode_kd(MODE_CANDIDATE, st)
        f, a2, _ = geometric_scalars(st, su3, kd, mode=MODE_CANDIDATE)
        assert f == pytest.approx(r_val + kd, rel=1e-12, abs=1e-12)
        assert f == pytest.approx(2 * r_val / 3, rel=1e-10, abs=1e-12)
        assert a2 >= 0.0


def test_geometric_scalars_laplacian_zero_in_minimal_mode(su3):
    st = state_from_angle(1.0, 0.3, 0.7)
    lab = get_lab(su3)
    kd = lab.mode_kd(MODE_MINIMAL, st)
    # f vanishes identically along the minimal flow, so the second difference
    # is pure float roundoff amplified by 1/h^2; a coarser step keeps that
    # below 1e-6.
    f, _, laplacian = geometric_scalars(st, su3, kd, mode=MODE_MINIMAL, h_fd=1e-3)
    assert abs(f) < 1e-12
    assert abs(laplacian) < 1e-6


def test_candidate_kd_is_minus_third_of_curvature_sum(su3):
    lab = get_lab(su3)
    st = state_from_angle(1.0, 0.4, 1.1)
    for _ in range(50):
        st = step_candidate(st, su3, 1e-3)
    r_val = lab.R(st.x, st.y, st.xd, st.yd)
    assert lab.mode_kd(MODE_CANDIDATE, st) == pytest.approx(-r_val / 3)


def test_step_reversal_retraces(su3):
    st = state_from_angle(1.0, 0.3, 0.5)
    forward = step_minimal(st, su3, 1e-4)
    back = step_minimal(forward, su3, -1e-4)
    assert back.x == pytest.approx(st.x, abs=1e-13)
    assert back.y == pytest.approx(st.y, abs=1e-13)
    assert back.xd == pytest.approx(st.xd, abs=1e-12)
    assert back.yd == pytest.approx(st.yd, abs=1e-12)


def test_plane_curve_curvature_of_circle():
    # The planar-curvature reconstruction used in trajectory diagnostics
    # recovers 1/r on a circle and 0 on a straight line.
    r = 2.0
    h = 1e-4

    def circle(s):
        return CurveState(s=s, x=r * math.cos(s / r), y=r * math.sin(s / r),
                          xd=-math.sin(s / r), yd=math.cos(s / r))

    sm, s0, sp = circle(-h), circle(0.0), circle(h)
    xdd = (sp.xd - sm.xd) / (2 * h)
    ydd = (sp.yd - sm.yd) / (2 * h)
    assert ydd * s0.xd - xdd * s0.yd == pytest.approx(1 / r, rel=1e-7)

    def line(s):
        return CurveState(s=s, x=1 + s * 0.6, y=1 + s * 0.8, xd=0.6, yd=0.8)

    sm, s0, sp = line(-h), line(0.0), line(h)
    xdd = (sp.xd - sm.xd) / (2 * h)
    ydd = (sp.yd - sm.yd) / (2 * h)
    assert ydd * s0.xd - xdd * s0.yd == pytest.approx(0.0, abs=1e-12)


def test_minimal_integration_keeps_f_small(su3):
    cfg = IntegratorConfig(step=1e-4, max_steps=3000, mode=MODE_MINIMAL)
    trajectory = integrate_curve(state_from_angle(1.0, 0.3, 0.7), cfg, su3)
    assert trajectory.stop_reason == "max_steps"
    assert trajectory.max_abs_f < 1e-6
    assert trajectory.speed_drift < 1e-9


def test_minimal_cone_direction_is_invariant():
    case = registry_case("SOpxSOq", {"p": 2, "q": 3})
    (sigma,) = minimal_line_angles(case)
    start = state_from_angle(math.cos(sigma), math.sin(sigma), sigma)
    cfg = IntegratorConfig(step=1e-4, max_steps=5000, mode=MODE_MINIMAL)
    trajectory = integrate_curve(start, cfg, case)
    slope = math.tan(sigma)
    for st in trajectory.states[::500]:
        assert abs(st.y - slope * st.x) < 1e-8


def test_tangent_reversal_retraces_path(su3):
    cfg = IntegratorConfig(step=1e-3, max_steps=300, mode=MODE_MINIMAL)
    outbound = integrate_curve(state_from_angle(1.0, 0.3, 0.7), cfg, su3)
    end = outbound.states[-1]
    reversed_start = CurveState(s=0.0, x=end.x, y=end.y, xd=-end.xd, yd=-end.yd)
    inbound = integrate_curve(reversed_start, cfg, su3)
    back = inbound.states[-1]
    assert back.x == pytest.approx(1.0, abs=1e-9)
    assert back.y == pytest.approx(0.3, abs=1e-9)


def test_tangential_residual_vanishes_on_minimal_line():
    # Along a minimal cone direction f and df/ds both vanish, so the
    # tangential residual f'(f + 2 kd) is measurement noise only.
    case = registry_case("SOpxSOq", {"p": 3, "q": 5})
    (sigma,) = minimal_line_angles(case)
    start = state_from_angle(math.cos(sigma), math.sin(sigma), sigma)
    cfg = IntegratorConfig(step=1e-4, max_steps=2000, mode=MODE_MINIMAL)
    trajectory = integrate_curve(start, cfg, case)
    f_col = [row[5] for row in trajectory.rows]
    h = cfg.step
    worst = 0.0
    for i in range(2, len(f_col) - 2):
        f_dot = (f_col[i + 1] - f_col[i - 1]) / (2 * h)
        kd = get_lab(case).mode_kd(MODE_MINIMAL, trajectory.states[i])
        worst = max(worst, abs(f_dot * (f_col[i] + 2 * kd)))
    assert worst < 1e-6


def test_boundary_stop_on_vertical_drop():
    # In the half-plane chamber a vertical drop has zero curvature sum, stays
    # a straight line, and must stop at the y = 0 wall.  (Generic minimal
    # curves bend away from walls, so this is the clean guaranteed hit.)
    case = registry_case("SOn-1")
    cfg = IntegratorConfig(step=1e-3, max_steps=10000, mode=MODE_MINIMAL,
                           wall_epsilon=1e-9)
    trajectory = integrate_curve(state_from_angle(0.0, 1.0, -math.pi / 2), cfg, case)
    assert trajectory.stop_reason == "boundary"
    last = trajectory.states[-1]
    assert last.y == pytest.approx(0.0, abs=2e-3)
    assert last.y > 0


def test_initial_state_outside_chamber_rejected(su3):
    cfg = IntegratorConfig()
    with pytest.raises(BoundaryError):
        integrate_curve(state_from_angle(0.3, 1.0, 0.0), cfg, su3)  # above the cone


def test_zero_steps_gives_single_row(su3):
    cfg = IntegratorConfig(max_steps=0)
    trajectory = integrate_curve(state_from_angle(1.0, 0.3, 0.7), cfg, su3)
    assert len(trajectory.rows) == 1


def test_symbolic_r_dot_matches_finite_differences(all_cases):
    rng = random.Random(4)
    h = 1e-5
    for case in all_cases:
        lab = get_lab(case)
        for _ in range(5):
            st = _random_interior_state(case, rng)
            plus = step_candidate(st, case, h)
            minus = step_candidate(st, case, -h)
            fd = (lab.R(plus.x, plus.y, plus.xd, plus.yd)
                  - lab.R(minus.x, minus.y, minus.xd, minus.yd)) / (2 * h)
            sym = lab.r_dot_symbolic(st)
            scale = max(abs(sym), abs(fd), 1e-9)
            assert abs(sym - fd) / scale < 1e-6, case.label


def test_normal_residual_two_routes_agree(su3):
    rng = random.Random(5)
    for _ in range(10):
        st = _random_interior_state(su3, rng)
        poly_val, ode_val = normal_residual(st, su3)
        scale = max(abs(poly_val), abs(ode_val), 1e-12)
        assert abs(poly_val - ode_val) / scale < 1e-4


def test_residual_generically_nonzero_on_candidate_curves(su3):
    cfg = IntegratorConfig(step=1e-4, max_steps=500, mode=MODE_CANDIDATE)
    trajectory = integrate_curve(state_from_angle(1.0, 0.3, 0.7), cfg, su3)
    sup = max(abs(a) for a, _ in trajectory.residual_pairs)
    assert sup > 1e-3


def test_trajectory_csv_format(su3):
    cfg = IntegratorConfig(step=1e-4, max_steps=10, mode=MODE_CANDIDATE)
    trajectory = integrate_curve(state_from_angle(1.0, 0.3, 0.7), cfg, su3)
    buffer = io.StringIO()
    trajectory.write_csv(buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 12
    first = lines[1].split(",")
    assert len(first) == 9
    assert float(first[1]) == 1.0
    # 17 significant digits survive a float round trip
    assert float(first[3]) == trajectory.states[0].xd


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(step=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(mode="fancy")
    with pytest.raises(ValueError):
        IntegratorConfig(wall_epsilon=-1.0)
