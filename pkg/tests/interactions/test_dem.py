from __future__ import annotations

import math

import numpy as np
import pytest

from sflsim.case.assembly import assemble_case
from sflsim.case.models import validate_document
from sflsim.core.io import load_yaml, read_case_file
from sflsim.errors import EvaluationError
from sflsim.interactions.dem import effective_modulus, effective_radius, hertz_stiffness
from sflsim.scheduler.runner import run

RADIUS = 0.004
YOUNG = 2.06e6
POISSON = 0.33
MASS = 0.01

SPHERES = [
    ("R", str(RADIUS)),
    ("E", str(YOUNG)),
    ("nu", str(POISSON)),
    ("m", str(MASS)),
]
CALL = "dem_l(v, R, E, nu, m, cf, 0.01)"
PAIR_DOMAIN = {"cell_size": "0.01|0.01|0.01", "minimum": "0|0|0", "maximum": "2|1|1", "boundary": "0|0|0"}
WALL_DOMAIN = {"cell_size": "0.01|0.01|0.01", "minimum": "0|0|0", "maximum": "3|3|2", "boundary": "2|2|2"}


def hertz_force(overlap: float) -> float:
    stiffness = hertz_stiffness(
        effective_radius(RADIUS, RADIUS), effective_modulus(YOUNG, YOUNG, POISSON, POISSON)
    )
    return float(stiffness) * overlap**1.5


def sphere_pair(build_case, velocity: str = "0|0|0", friction: str = "0"):
    return build_case(
        domain=PAIR_DOMAIN,
        points=[(0.005, 0.005, 0.005), (0.0129, 0.005, 0.005)],
        constants=[("cf", friction)],
        fields=[*SPHERES, ("v", velocity)],
    )


def test_hertz_stiffness_of_equal_spheres() -> None:
    stiffness = hertz_stiffness(effective_radius(RADIUS, RADIUS), effective_modulus(YOUNG, YOUNG, POISSON, POISSON))

    assert float(stiffness) == pytest.approx(4.0 / 3.0 * math.sqrt(0.002) * YOUNG / (2.0 * (1 - POISSON**2)))
    assert float(stiffness) == pytest.approx(68923.0, rel=1e-4)


def test_overlapping_spheres_repel_with_hertz_force(build_case, evaluate) -> None:
    case = sphere_pair(build_case)

    acceleration = evaluate(case, CALL)

    force = acceleration[0, :, 0] * MASS
    assert abs(np.linalg.norm(force) - 6.89e-2) < 1e-4
    assert force[0] < 0.0
    assert force[0] == pytest.approx(-hertz_force(2 * RADIUS - 0.0079), rel=1e-6)
    assert acceleration[1, :, 0] == pytest.approx(-acceleration[0, :, 0])


def test_sliding_contact_adds_friction_along_relative_velocity(build_case, evaluate) -> None:
    case = sphere_pair(build_case, velocity="0|(comp(r,0)>0.01)|0", friction="0.5")

    acceleration = evaluate(case, CALL)

    normal = hertz_force(2 * RADIUS - 0.0079)
    assert acceleration[0, 1, 0] * MASS == pytest.approx(0.5 * normal, rel=1e-6)
    assert acceleration[1, 1, 0] * MASS == pytest.approx(-0.5 * normal, rel=1e-6)


def test_approaching_spheres_feel_extra_damping(build_case, evaluate) -> None:
    resting = evaluate(sphere_pair(build_case), CALL)
    closing = evaluate(sphere_pair(build_case, velocity="(comp(r,0)>0.01)*(-0.1)|0|0"), CALL)

    assert closing[0, 0, 0] < resting[0, 0, 0] < 0.0


def test_separated_spheres_do_not_interact(build_case, evaluate) -> None:
    case = build_case(
        domain=PAIR_DOMAIN,
        points=[(0.005, 0.005, 0.005), (0.0139, 0.005, 0.005)],
        constants=[("cf", "0")],
        fields=[*SPHERES, ("v", "0|0|0")],
    )

    assert np.all(evaluate(case, CALL) == 0.0)


def test_symmetric_wall_pushes_sphere_through_its_own_image(build_case, evaluate) -> None:
    case = build_case(
        domain=WALL_DOMAIN,
        points=[(0.015, 0.015, 0.0039)],
        constants=[("cf", "0")],
        fields=[*SPHERES, ("v", "0|0|0")],
    )

    wall = evaluate(case, "dem_boundary_force(v, R, E, nu, m, cf, 0.01)")
    total = evaluate(case, CALL)

    expected = hertz_force(2 * (RADIUS - 0.0039))
    assert wall[0, :, 0] == pytest.approx([0.0, 0.0, expected], rel=1e-6, abs=1e-12)
    assert total[0, :, 0] == pytest.approx([0.0, 0.0, expected / MASS], rel=1e-6, abs=1e-9)


def test_nonpositive_sphere_radius_is_rejected(build_case, evaluate) -> None:
    case = build_case(
        domain=PAIR_DOMAIN,
        points=[(0.005, 0.005, 0.005), (0.0129, 0.005, 0.005)],
        constants=[("cf", "0")],
        fields=[("R", "0"), ("E", str(YOUNG)), ("nu", str(POISSON)), ("m", str(MASS)), ("v", "0|0|0")],
    )

    with pytest.raises(EvaluationError, match="sphere radius must be positive, particle 0"):
        evaluate(case, CALL)


def collide(fixtures_dir, damping: str):
    data = load_yaml(fixtures_dir / "dem_damper.yaml")
    data["simulation"]["case"]["workspace"]["constants"][-1] = {"damping": damping}
    case = assemble_case(validate_document(data))
    v = case.workspace.fields["v"].data[:, :, 0]
    before = 0.5 * MASS * float(np.sum(v**2))
    run(case)
    v = case.workspace.fields["v"].data[:, :, 0]
    return before, 0.5 * MASS * float(np.sum(v**2)), v


@pytest.mark.slow
def test_head_on_collision_conserves_energy_without_damping(fixtures_dir) -> None:
    before, after, v = collide(fixtures_dir, "0")

    assert after == pytest.approx(before, rel=1e-2)
    assert v[0, 0] < 0.0 < v[1, 0]
    assert v[0, 0] == pytest.approx(-v[1, 0])


@pytest.mark.slow
def test_head_on_collision_loses_energy_with_damping(fixtures_dir) -> None:
    _, elastic, _ = collide(fixtures_dir, "0")
    before, damped, v = collide(fixtures_dir, "1")

    assert damped < elastic
    assert damped < before
    assert v[0, 0] < 0.0 < v[1, 0]


@pytest.mark.slow
def test_particle_damper_reduces_tank_amplitude(fixtures_dir) -> None:
    case = assemble_case(read_case_file(fixtures_dir / "particle_damper.yaml"), base_dir=fixtures_dir)

    run(case, threads=1)

    variables = case.workspace.variables
    assert case.system.count == 64
    assert case.system.active.all()
    assert variables["early"].item() == pytest.approx(0.05, rel=1e-2)
    assert 0.0 < variables["late"].item() < variables["early"].item()


def test_contact_forces_between_spheres_sum_to_zero(build_case, evaluate) -> None:
    rng = np.random.default_rng(13)
    case = build_case(
        domain={"cell_size": "0.01|0.01|0.01", "minimum": "0|0|0", "maximum": "4|4|4", "boundary": "0|0|0"},
        points=rng.uniform(0.004, 0.036, (80, 3)).tolist(),
        constants=[("cf", "0.3")],
        fields=[*SPHERES, ("v", "rand(-0.1,0.1)|rand(-0.1,0.1)|rand(-0.1,0.1)")],
    )

    force = evaluate(case, CALL) * MASS

    scale = np.abs(force).max()
    assert scale > 0.0
    assert np.abs(force.sum(axis=0)).max() <= 1e-10 * case.system.count * scale
