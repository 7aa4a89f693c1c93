import math

import numpy as np
import pytest

from regrasp.errors import IkInfeasible, JointOutOfLimits
from regrasp.kinematics import (
    Configuration,
    Link,
    RobotModel,
    Transform,
    forward_kinematics,
    link_coms_world,
    load_robot_model,
    pose_error,
    solve_ik,
    solve_ik_tasks,
)

from conftest import BIPED_PATH
from oracles import chain_fk


def toy_model():
    links = (
        Link("base", None, Transform.identity(), mass=5.0),
        Link(
            "pivot",
            "base",
            Transform.from_rpy([0, 0, 50], [0, 0, 0]),
            axis=(0, 0, 1),
            limits=(-math.pi, math.pi),
            mass=1.0,
            local_com=(50, 0, 0),
        ),
        Link("tip", "pivot", Transform.from_rpy([100, 0, 0], [0, 0, 0]), mass=0.5),
    )
    return RobotModel(
        name="toy",
        links=links,
        end_effectors={"left_hand": "tip", "right_hand": "tip"},
        feet={},
    )


def model_to_oracle_links(model):
    return [
        {
            "name": l.name,
            "parent": l.parent,
            "origin_rotation": l.origin.rotation,
            "origin_translation": l.origin.translation,
            "axis": l.axis,
        }
        for l in model.links
    ]


@pytest.fixture(scope="module")
def biped():
    return load_robot_model(BIPED_PATH)


def random_configuration(model, rng, scale=1.0):
    values = {}
    for name in model.revolute_joints():
        lo, hi = model.link(name).limits
        mid = (lo + hi) / 2
        span = (hi - lo) / 2 * scale
        values[name] = float(rng.uniform(mid - span, mid + span))
    base = Transform.rot_z(0.0, (0.0, 0.0, 880.0))
    return Configuration(base, values)


class TestForwardKinematics:
    def test_rest_pose_chains_origins(self):
        model = toy_model()
        q = Configuration(Transform.identity(), {"pivot": 0.0})
        world = forward_kinematics(model, q)
        assert np.allclose(world["tip"].translation, [100, 0, 50])

    def test_quarter_turn_about_z(self):
        model = toy_model()
        q = Configuration(Transform.identity(), {"pivot": math.pi / 2})
        world = forward_kinematics(model, q)
        assert np.allclose(world["tip"].translation, [0, 100, 50], atol=1e-9)

    def test_matches_naive_chain_oracle(self, biped):
        rng = np.random.default_rng(123)
        for _ in range(20):
            q = random_configuration(biped, rng)
            world = forward_kinematics(biped, q)
            oracle = chain_fk(
                model_to_oracle_links(biped),
                q.joint_values,
                q.base_pose.rotation,
                q.base_pose.translation,
            )
            for name, t in world.items():
                assert np.allclose(t.translation, oracle[name][:3, 3], atol=1e-9)
                assert np.allclose(t.rotation, oracle[name][:3, :3], atol=1e-9)

    def test_out_of_limits_raises(self, biped):
        q = Configuration(Transform.identity(), {"waist_yaw": 9.0})
        with pytest.raises(JointOutOfLimits) as err:
            forward_kinematics(biped, q)
        assert err.value.joint == "waist_yaw"

    def test_fk_composition_property(self, biped):
        rng = np.random.default_rng(5)
        q = random_configuration(biped, rng)
        world = forward_kinematics(biped, q)
        for link in biped.links:
            if link.parent is None:
                continue
            expected = world[link.parent].compose(link.origin)
            got = world[link.name]
            # Strip the joint rotation: translations must agree exactly.
            assert np.allclose(expected.translation, got.translation, atol=1e-9)

    def test_rigid_body_invariance(self, biped):
        rng = np.random.default_rng(11)
        p1 = np.array([120.0, -40.0, 60.0])
        p2 = np.array([-30.0, 80.0, -90.0])
        ref = None
        for _ in range(10):
            q = random_configuration(biped, rng)
            t = forward_kinematics(biped, q)["l_elbow"]
            d = np.linalg.norm(t.apply(p1) - t.apply(p2))
            if ref is None:
                ref = d
            assert d == pytest.approx(ref, rel=1e-9)

    def test_determinism(self, biped):
        rng = np.random.default_rng(99)
        q = random_configuration(biped, rng)
        w1 = forward_kinematics(biped, q)
        w2 = forward_kinematics(biped, q)
        for name in w1:
            assert np.array_equal(w1[name].translation, w2[name].translation)
            assert np.array_equal(w1[name].rotation, w2[name].rotation)


class TestLinkComs:
    def test_single_link_rest(self):
        links = (
            Link("base", None, Transform.identity(), mass=10.0, local_com=(0, 0, 100)),
        )
        model = RobotModel("m", links, {"left_hand": "base", "right_hand": "base"}, {})
        q = Configuration(Transform.identity(), {})
        (mass, com), = link_coms_world(model, q)
        assert mass == 10.0
        assert np.allclose(com, [0, 0, 100])

    def test_masses_sum_to_total(self, biped):
        q = Configuration(Transform.identity(), {n: 0.0 for n in biped.revolute_joints()})
        total = sum(m for m, _ in link_coms_world(biped, q))
        assert total == pytest.approx(biped.total_mass)

    def test_rotated_link_negates_com_x(self):
        model = toy_model()
        q0 = Configuration(Transform.identity(), {"pivot": 0.0})
        q1 = Configuration(Transform.identity(), {"pivot": math.pi})
        com0 = dict((l.name, c) for l, (m, c) in zip(model.links, link_coms_world(model, q0)))
        com1 = dict((l.name, c) for l, (m, c) in zip(model.links, link_coms_world(model, q1)))
        assert com1["pivot"][0] == pytest.approx(-com0["pivot"][0], abs=1e-9)


class TestInverseKinematics:
    def test_already_solved_target(self, biped):
        rng = np.random.default_rng(3)
        seed = random_configuration(biped, rng, scale=0.4)
        target = forward_kinematics(biped, seed)[biped.hand_link("left")]
        q = solve_ik(biped, "left", target, seed)
        residual = pose_error(target, forward_kinematics(biped, q)[biped.hand_link("left")])
        assert np.linalg.norm(residual[:3]) < 1e-6

    def test_round_trip_through_fk(self, biped):
        rng = np.random.default_rng(17)
        seed = Configuration(
            Transform.rot_z(0.0, (0, 0, 880)),
            {n: biped.rest_pose.get(n, 0.0) for n in biped.revolute_joints()},
        )
        ok = 0
        for _ in range(25):
            q_rand = random_configuration(biped, rng, scale=0.7)
            target = forward_kinematics(biped, q_rand)[biped.hand_link("right")]
            q = solve_ik(biped, "right", target, seed)
            world = forward_kinematics(biped, q)
            err = pose_error(target, world[biped.hand_link("right")])
            assert np.linalg.norm(err[:3]) < 1.0
            assert np.linalg.norm(err[3:]) < 0.01
            for name in biped.revolute_joints():
                lo, hi = biped.link(name).limits
                assert lo - 1e-9 <= q.joint_values[name] <= hi + 1e-9
            ok += 1
        assert ok == 25

    def test_out_of_reach_is_infeasible(self, biped):
        seed = Configuration(
            Transform.rot_z(0.0, (0, 0, 880)),
            {n: biped.rest_pose.get(n, 0.0) for n in biped.revolute_joints()},
        )
        target = Transform.from_rpy([4000.0, 0.0, 1000.0], [0, 0, 0])
        with pytest.raises(IkInfeasible):
            solve_ik(biped, "left", target, seed)

    def test_dual_arm_tasks(self, biped):
        rng = np.random.default_rng(29)
        seed = Configuration(
            Transform.rot_z(0.0, (0, 0, 880)),
            {n: biped.rest_pose.get(n, 0.0) for n in biped.revolute_joints()},
        )
        q_rand = random_configuration(biped, rng, scale=0.5)
        world = forward_kinematics(biped, q_rand)
        targets = {
            biped.hand_link("left"): world[biped.hand_link("left")],
            biped.hand_link("right"): world[biped.hand_link("right")],
        }
        q = solve_ik_tasks(biped, targets, seed, budget=600)
        got = forward_kinematics(biped, q)
        for link, target in targets.items():
            err = pose_error(target, got[link])
            assert np.linalg.norm(err[:3]) < 1.0
            assert np.linalg.norm(err[3:]) < 0.01

    def test_determinism(self, biped):
        rng = np.random.default_rng(31)
        seed = random_configuration(biped, rng, scale=0.3)
        target = forward_kinematics(biped, random_configuration(biped, rng, scale=0.6))[
            biped.hand_link("left")
        ]
        q1 = solve_ik(biped, "left", target, seed)
        q2 = solve_ik(biped, "left", target, seed)
        assert q1.joint_values == q2.joint_values
