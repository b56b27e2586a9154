from __future__ import annotations

import math

import numpy as np
import pytest

from sflsim.errors import EvaluationError, TensorShapeError
from sflsim.kernels import make_kernel

UNIT_SQUARE = {"cell_size": "1|1", "minimum": "0|0", "maximum": "1|1", "boundary": "0|0"}
PAIR = [(0.4, 0.5), (0.6, 0.5)]


def wendland_2d(h: float):
    return make_kernel("Wp52220", 2.0 * h)


def lattice_case(build_case, fields):
    """21x21 particles at spacing 0.1 with h = 0.2 (radius = cell size = 0.4)."""
    return build_case(
        domain={"cell_size": "0.4|0.4", "minimum": "0|0", "maximum": "6|6", "boundary": "0|0"},
        grid={"gpos": "0|0", "gsize": "2|2", "gip_dist": "0.1|0.1"},
        constants=[("h", "0.2"), ("mass", "0.01"), ("rho", "1")],
        fields=fields,
    )


CENTER = 10 * 21 + 10


def test_sample_of_isolated_particle_is_its_own_kernel_peak(build_case, evaluate) -> None:
    case = build_case(domain=UNIT_SQUARE, points=[(0.5, 0.5)], fields=[("m", "2"), ("rho", "4"), ("A", "1")])

    result = evaluate(case, "sph_S(A, m, rho, Wp52220, 1)")

    assert result[0, 0, 0] == pytest.approx(0.5 * 7.0 / math.pi)


def test_sample_of_constant_field_reproduces_it_in_the_interior(build_case, evaluate) -> None:
    case = lattice_case(build_case, [("A", "3")])

    result = evaluate(case, "sph_S(A, mass, rho, Wp52220, 2*h)")

    assert result[CENTER, 0, 0] == pytest.approx(3.0, rel=2e-2)


def test_divergence_of_linear_field_is_one(build_case, evaluate) -> None:
    case = lattice_case(build_case, [("u", "comp(r,0)|0")])

    result = evaluate(case, "sph_D00(u, mass, rho, Wp52220, 2*h)")

    assert result.shape == (441, 1, 1)
    assert result[CENTER, 0, 0] == pytest.approx(1.0, abs=2e-2)


def test_divergence_needs_a_vector_operand(build_case, evaluate) -> None:
    case = lattice_case(build_case, [("p", "1")])

    with pytest.raises(TensorShapeError, match="2x1 vector A operand"):
        evaluate(case, "sph_D00(p, mass, rho, Wp52220, 2*h)")


def test_laplacian_of_quadratic_is_two_in_the_interior(build_case, evaluate) -> None:
    case = build_case(
        domain={"cell_size": "0.4", "minimum": "0", "maximum": "6", "boundary": "0"},
        grid={"gpos": "0", "gsize": "2", "gip_dist": "0.1"},
        constants=[("mass", "0.1"), ("rho", "1")],
        fields=[("A", "comp(r,0)^2")],
    )

    result = evaluate(case, "sph_L0(A, mass, rho, Wp51220, 0.4)")

    interior = result[3:18, 0, 0]
    assert np.all(np.abs(interior - 2.0) < 5e-2)


def test_symmetric_gradient_pair_is_antisymmetric_and_matches_hand_value(build_case, evaluate) -> None:
    case = build_case(domain=UNIT_SQUARE, points=PAIR, fields=[("m", "1"), ("rho", "1"), ("p", "10*comp(r,0)")])

    result = evaluate(case, "sph_G11(p, m, rho, Wp52220, 1)")

    slope = float(wendland_2d(0.5).radial_slope(np.array(0.2)))
    assert result[0, :, 0] == pytest.approx([10.0 * slope, 0.0])
    assert result[1, :, 0] == pytest.approx(-result[0, :, 0])


def test_artificial_viscosity_acts_only_on_approaching_pairs(build_case, evaluate) -> None:
    fields = [("m", "1"), ("rho", "1")]
    approaching = build_case(domain=UNIT_SQUARE, points=PAIR, fields=[*fields, ("v", "(comp(r,0)>0.5)*(-1)|0")])
    receding = build_case(domain=UNIT_SQUARE, points=PAIR, fields=[*fields, ("v", "(comp(r,0)>0.5)|0")])

    closing = evaluate(approaching, "sph_A(v, m, rho, Wp52220, 1)")
    opening = evaluate(receding, "sph_A(v, m, rho, Wp52220, 1)")

    slope = float(wendland_2d(0.5).radial_slope(np.array(0.2)))
    assert closing[0, :, 0] == pytest.approx([-5.0 * slope, 0.0])
    assert closing[1, :, 0] == pytest.approx([5.0 * slope, 0.0])
    assert np.all(opening == 0.0)


def test_symmetric_wall_image_adds_mirrored_contribution(build_case, evaluate) -> None:
    domain = {**UNIT_SQUARE, "boundary": "2|2"}
    case = build_case(domain=domain, points=[(0.1, 0.5)], fields=[("m", "1"), ("rho", "1"), ("u", "1|1")])

    result = evaluate(case, "sph_S(u, m, rho, Wp52220, 1)")

    kernel = wendland_2d(0.5)
    w0, w_image = float(kernel.value(np.array(0.0))), float(kernel.value(np.array(0.2)))
    assert result[0, :, 0] == pytest.approx([w0 - w_image, w0 + w_image])


def test_zero_density_is_an_error(build_case, evaluate) -> None:
    case = build_case(domain=UNIT_SQUARE, points=PAIR, fields=[("m", "1"), ("rho", "comp(r,0)>0.5"), ("A", "1")])

    with pytest.raises(EvaluationError, match="density of particle 0 is zero"):
        evaluate(case, "sph_S(A, m, rho, Wp52220, 1)")


def test_kernel_of_another_dimension_keeps_its_normalization_and_warns(build_case, evaluate) -> None:
    case = build_case(domain=UNIT_SQUARE, points=[(0.5, 0.5)], fields=[("m", "1"), ("rho", "1"), ("A", "1")])

    result = evaluate(case, "sph_S(A, m, rho, Wp53220, 1)")

    assert result[0, 0, 0] == pytest.approx(21.0 / (16.0 * math.pi * 0.125))
    assert case.diagnostics.counts()["kernel-dimension"] == 1


def test_radius_larger_than_cell_is_counted_as_a_warning(build_case, evaluate) -> None:
    case = build_case(domain=UNIT_SQUARE, points=PAIR, fields=[("m", "1"), ("rho", "1"), ("A", "1")])

    evaluate(case, "sph_S(A, m, rho, Wp52220, 2)")

    assert case.diagnostics.counts()["radius-exceeds-cell"] == 1


def test_coincident_particles_are_skipped_and_counted(build_case, evaluate) -> None:
    case = build_case(
        domain=UNIT_SQUARE, points=[(0.5, 0.5), (0.5, 0.5)], fields=[("m", "1"), ("rho", "1"), ("u", "comp(r,0)|0")]
    )

    result = evaluate(case, "sph_D00(u, m, rho, Wp52220, 1)")

    assert np.all(result == 0.0)
    assert case.diagnostics.counts()["coincident-pair"] == 2


ONE_D_WALL = {"cell_size": "1", "minimum": "0", "maximum": "4", "boundary": "2"}
NEAR_WALL = [(0.25,)]


def test_scalar_image_across_a_1d_wall_keeps_its_sign(build_case, evaluate) -> None:
    case = build_case(domain=ONE_D_WALL, points=NEAR_WALL, fields=[("m", "1"), ("rho", "1"), ("a", "1")])

    result = evaluate(case, "sph_S(a, m, rho, Wp51220, 1)")

    kernel = make_kernel("Wp51220", 1.0)
    w0, w_image = float(kernel.value(np.array(0.0))), float(kernel.value(np.array(0.5)))
    assert result[0, 0, 0] == pytest.approx(w0 + w_image)


def test_laplacian_of_constant_vanishes_at_a_1d_wall(build_case, evaluate) -> None:
    case = build_case(domain=ONE_D_WALL, points=NEAR_WALL, fields=[("m", "1"), ("rho", "1"), ("a", "3")])

    result = evaluate(case, "sph_L0(a, m, rho, Wp51220, 1)")

    assert result[0, 0, 0] == pytest.approx(0.0)


def test_velocity_image_across_a_1d_wall_is_reflected(build_case, evaluate) -> None:
    case = build_case(domain=ONE_D_WALL, points=NEAR_WALL, fields=[("m", "1"), ("rho", "1"), ("v", "1")])

    result = evaluate(case, "sph_D00(v, m, rho, Wp51220, 1)")

    # image velocity -1 at rel = -0.5
    slope = float(make_kernel("Wp51220", 1.0).radial_slope(np.array(0.5)))
    assert result[0, 0, 0] == pytest.approx(2.0 * slope)


def direct_sample(positions, values, mass, rho, radius: float) -> np.ndarray:
    """sum_j A_j m_j/rho_j W(|r_j - r_i|) written out for a 2D Wendland kernel, no images."""
    h = radius / 2.0
    distance = np.linalg.norm(positions[None, :, :] - positions[:, None, :], axis=2)
    q = distance / h
    w = 7.0 / (4.0 * math.pi * h**2) * np.clip(1.0 - q / 2.0, 0.0, None) ** 4 * (2.0 * q + 1.0)
    w[distance >= radius] = 0.0
    return w @ (values * mass / rho)


def test_sample_matches_direct_summation_on_a_thousand_particles(build_case, evaluate) -> None:
    case = build_case(
        domain={"cell_size": "0.25|0.25", "minimum": "0|0", "maximum": "8|8", "boundary": "0|0"},
        grid={"gpos": "0.03|0.03", "gsize": "1.9|1.9", "gip_dist": "0.0625|0.0625"},
        fields=[
            ("A", "sin(3*comp(r,0))*cos(2*comp(r,1))"),
            ("m", "0.004*(1 + 0.1*rand(0,1))"),
            ("rho", "1 + 0.2*rand(0,1)"),
        ],
    )

    result = evaluate(case, "sph_S(A, m, rho, Wp52220, 0.25)")[:, 0, 0]

    assert case.system.count == 961
    expected = direct_sample(
        case.system.positions,
        evaluate(case, "A")[:, 0, 0],
        evaluate(case, "m")[:, 0, 0],
        evaluate(case, "rho")[:, 0, 0],
        0.25,
    )
    assert np.allclose(result, expected, rtol=1e-12, atol=1e-12)


def test_sample_is_unchanged_by_a_periodic_translation(build_case, evaluate) -> None:
    domain = {"cell_size": "0.5|0.5", "minimum": "0|0", "maximum": "8|8", "boundary": "1|1"}
    points = np.random.default_rng(21).uniform(0.0, 4.0, (150, 2))
    shifted = np.mod(points + [1.3, -0.7], 4.0)
    fields = [("m", "1"), ("rho", "1"), ("A", "rand(0,1)")]

    original = build_case(domain=domain, points=points.tolist(), fields=fields)
    moved = build_case(domain=domain, points=shifted.tolist(), fields=fields)

    call = "sph_S(A, m, rho, Wp52220, 0.5)"
    assert np.allclose(evaluate(original, call), evaluate(moved, call), rtol=1e-12, atol=1e-12)


def test_symmetric_gradient_forces_sum_to_zero(build_case, evaluate) -> None:
    rng = np.random.default_rng(8)
    case = build_case(
        domain={"cell_size": "0.5|0.5", "minimum": "0|0", "maximum": "8|8", "boundary": "0|0"},
        points=rng.uniform(0.0, 4.0, (200, 2)).tolist(),
        fields=[("m", "0.5 + rand(0,1)"), ("rho", "900 + rand(0,200)"), ("p", "rand(0,1000)")],
    )

    gradient = evaluate(case, "sph_G11(p, m, rho, Wp52220, 0.5)")
    force = -evaluate(case, "m/rho") * gradient

    scale = np.abs(force).max()
    assert scale > 0.0
    assert np.abs(force.sum(axis=0)).max() <= 1e-10 * case.system.count * scale
