"""Coupling model: preset force laws, asymmetry, slack, and passivity."""

import numpy as np
import pytest

from cocarry.geometry import Pose, Twist, quat_from_yaw
from cocarry.objects import ObjectModel, elastic_energy, object_wrench, preset, presets


def still(p):
    return Pose(np.asarray(p, dtype=float)), Twist()


def wrench_at(model, hand_p, ee_p, hand_v=(0, 0, 0), ee_v=(0, 0, 0), ee_yaw=0.0):
    hand = Pose(np.asarray(hand_p, dtype=float))
    ee = Pose(np.asarray(ee_p, dtype=float), quat_from_yaw(ee_yaw))
    return object_wrench(
        model, hand, Twist(np.array(hand_v, dtype=float)), ee,
        Twist(np.array(ee_v, dtype=float)),
    )


def test_rest_state_zero_wrench():
    model = preset("rigid_rod").with_rest([0.5, 0.0, 0.0])
    on_ee, on_hand = wrench_at(model, [0, 0, 0], [0.5, 0, 0])
    np.testing.assert_allclose(on_ee.force, np.zeros(3))
    np.testing.assert_allclose(on_hand.force, np.zeros(3))


def test_rigid_axial_stretch_force():
    # 0.01 m stretch at 1e4 N/m: 100 N pulling the EE back toward the hand
    model = preset("rigid_rod").with_rest([0.5, 0.0, 0.0])
    on_ee, on_hand = wrench_at(model, [0, 0, 0], [0.51, 0, 0])
    np.testing.assert_allclose(on_ee.force, [-100.0, 0, 0], atol=1e-9)
    np.testing.assert_allclose(on_hand.force, [100.0, 0, 0], atol=1e-9)


def test_bag_tension_compression_asymmetry():
    model = preset("peanut_bag").with_rest([0.5, 0.0, 0.0])
    pulled, _ = wrench_at(model, [0, 0, 0], [0.52, 0, 0])
    pushed, _ = wrench_at(model, [0, 0, 0], [0.48, 0, 0])
    assert np.linalg.norm(pulled.force) == pytest.approx(100.0)
    assert np.linalg.norm(pushed.force) == pytest.approx(6.0)
    assert pulled.force[0] < 0 < pushed.force[0]


def test_bag_lateral_stiffness():
    model = preset("peanut_bag").with_rest([0.5, 0.0, 0.0])
    on_ee, _ = wrench_at(model, [0, 0, 0], [0.5, 0.02, 0])
    np.testing.assert_allclose(on_ee.force, [0, -150.0 * 0.02, 0], atol=1e-9)


def test_rope_is_a_one_way_constraint():
    model = preset("slack_rope").with_rest([0.5, 0.0, 0.0])
    rng = np.random.default_rng(61)
    # anywhere inside the slack ball: no force at all
    for _ in range(200):
        ee = np.array([0.5, 0, 0]) + rng.uniform(-0.4, 0.4, size=3)
        on_ee, _ = wrench_at(model, [0, 0, 0], ee)
        np.testing.assert_allclose(on_ee.force, np.zeros(3))
    # compressed: still nothing (tension-only)
    on_ee, _ = wrench_at(model, [0, 0, 0], [0.1, 0, 0])
    np.testing.assert_allclose(on_ee.force, np.zeros(3))
    # stretched past rest + slack: tension engages
    on_ee, _ = wrench_at(model, [0, 0, 0], [0.5 + 1.0 + 0.01, 0, 0])
    np.testing.assert_allclose(on_ee.force, [-100.0, 0, 0], atol=1e-9)


def test_damping_acts_on_relative_velocity():
    model = preset("rigid_rod").with_rest([0.5, 0.0, 0.0])
    on_ee, on_hand = wrench_at(
        model, [0, 0, 0], [0.5, 0, 0], hand_v=(0.1, 0, 0), ee_v=(0.3, 0, 0)
    )
    np.testing.assert_allclose(on_ee.force, [-50.0 * 0.2, 0, 0], atol=1e-12)
    np.testing.assert_allclose(on_hand.force, -on_ee.force)
    # equal velocities: no damping force
    on_ee, _ = wrench_at(
        model, [0, 0, 0], [0.5, 0, 0], hand_v=(0.2, 0, 0), ee_v=(0.2, 0, 0)
    )
    np.testing.assert_allclose(on_ee.force, np.zeros(3))


def test_action_reaction_exact():
    rng = np.random.default_rng(62)
    models = list(presets().values())
    for _ in range(500):
        model = models[rng.integers(len(models))].with_rest(
            rng.normal(size=3), ref_yaw=rng.uniform(-3, 3)
        )
        hand = Pose(rng.normal(size=3), quat_from_yaw(rng.uniform(-3, 3)))
        ee = Pose(rng.normal(size=3), quat_from_yaw(rng.uniform(-3, 3)))
        on_ee, on_hand = object_wrench(
            model, hand, Twist(rng.normal(size=3)), ee, Twist(rng.normal(size=3))
        )
        assert np.array_equal(on_hand.force, -on_ee.force)
        assert np.array_equal(on_hand.torque, -on_ee.torque)
        np.testing.assert_allclose(on_ee.torque, np.zeros(3))


def test_force_continuity_at_breakpoints():
    # piecewise-linear law must match at the slack and compression boundaries
    model = ObjectModel(
        rest_vector=[0.5, 0.0, 0.0],
        axial_stiffness_tension=1e4,
        axial_stiffness_compression=300.0,
        lateral_stiffness=150.0,
        damping=0.0,
        slack_length=0.05,
    )
    eps = 1e-9
    for s in (0.0, 0.05):  # compression onset, tension onset
        lo, _ = wrench_at(model, [0, 0, 0], [0.5 + s - eps, 0, 0])
        hi, _ = wrench_at(model, [0, 0, 0], [0.5 + s + eps, 0, 0])
        assert np.linalg.norm(hi.force - lo.force) < 1e-4


def test_rest_vector_follows_ee_yaw():
    # yawing the EE re-seats the rest geometry, so a co-rotated arrangement
    # stays force-free
    model = preset("peanut_bag").with_rest([0.5, 0.0, 0.0], ref_yaw=0.0)
    phi = 0.9
    ee_p = np.array([np.cos(phi), np.sin(phi), 0.0]) * 0.5
    on_ee, _ = wrench_at(model, [0, 0, 0], ee_p, ee_yaw=phi)
    np.testing.assert_allclose(on_ee.force, np.zeros(3), atol=1e-9)
    # without the yaw the same positions are loaded
    on_ee, _ = wrench_at(model, [0, 0, 0], ee_p, ee_yaw=0.0)
    assert np.linalg.norm(on_ee.force) > 1.0


def test_degenerate_rest_treats_everything_as_lateral():
    model = ObjectModel(
        rest_vector=np.zeros(3),
        axial_stiffness_tension=1e4,
        axial_stiffness_compression=1e4,
        lateral_stiffness=200.0,
        damping=0.0,
    )
    on_ee, _ = wrench_at(model, [0, 0, 0], [0.03, -0.01, 0.02])
    np.testing.assert_allclose(on_ee.force, [-6.0, 2.0, -4.0], atol=1e-9)


def test_elastic_energy_properties():
    rng = np.random.default_rng(63)
    for name in presets():
        model = preset(name).with_rest([0.5, 0.0, 0.0])
        for _ in range(200):
            hand, _ = still(rng.normal(scale=0.3, size=3))
            ee, _ = still([0.5, 0, 0] + rng.normal(scale=0.3, size=3))
            assert elastic_energy(model, hand, ee) >= 0.0
        # exactly at rest: zero stored energy
        hand, _ = still([0, 0, 0])
        ee, _ = still([0.5, 0, 0])
        assert elastic_energy(model, hand, ee) == 0.0
    # inside the slack band the rope stores nothing
    rope = preset("slack_rope").with_rest([0.5, 0.0, 0.0])
    ee, _ = still([0.9, 0, 0])
    assert elastic_energy(rope, Pose(np.zeros(3)), ee) == 0.0


def test_energy_is_the_spring_potential():
    # force must be the negative displacement-gradient of the energy
    model = preset("peanut_bag").with_rest([0.5, 0.0, 0.0])
    rng = np.random.default_rng(64)
    h = 1e-6
    for _ in range(50):
        ee_p = np.array([0.5, 0, 0]) + rng.uniform(-0.05, 0.05, size=3)
        on_ee, _ = wrench_at(model, [0, 0, 0], ee_p)
        grad = np.zeros(3)
        for j in range(3):
            dp = np.zeros(3)
            dp[j] = h
            e_hi = elastic_energy(model, Pose(np.zeros(3)), Pose(ee_p + dp))
            e_lo = elastic_energy(model, Pose(np.zeros(3)), Pose(ee_p - dp))
            grad[j] = (e_hi - e_lo) / (2 * h)
        np.testing.assert_allclose(on_ee.force, -grad, atol=1e-3)


def test_preset_catalog():
    cat = presets()
    assert set(cat) == {"rigid_rod", "slack_rope", "peanut_bag", "wrapped_manikin"}
    rod = cat["rigid_rod"]
    assert rod.axial_stiffness_tension == rod.axial_stiffness_compression == 1e4
    assert rod.lateral_stiffness == 1e4 and rod.damping == 50.0
    rope = cat["slack_rope"]
    assert rope.axial_stiffness_compression == 0.0
    assert rope.lateral_stiffness == 0.0 and rope.slack_length == 1.0
    bag = cat["peanut_bag"]
    assert (bag.axial_stiffness_tension, bag.axial_stiffness_compression) == (5e3, 300.0)
    assert bag.lateral_stiffness == 150.0 and bag.damping == 20.0
    # returned models are copies; mutating one must not poison the registry
    rod.damping = 0.0
    assert preset("rigid_rod").damping == 50.0


def test_unknown_preset():
    with pytest.raises(KeyError, match="unknown object preset"):
        preset("feather_pillow")


def test_model_validation():
    with pytest.raises(ValueError):
        ObjectModel(
            rest_vector=np.zeros(3),
            axial_stiffness_tension=-1.0,
            axial_stiffness_compression=0.0,
            lateral_stiffness=0.0,
            damping=0.0,
        )


def test_static_deflection_under_load():
    # a 10 N pull deflects the rigid rod by 1 mm at steady state
    model = preset("rigid_rod").with_rest([0.5, 0.0, 0.0])
    on_ee, _ = wrench_at(model, [0, 0, 0], [0.501, 0, 0])
    assert np.linalg.norm(on_ee.force) == pytest.approx(10.0)
