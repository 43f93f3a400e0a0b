"""A slack rope transmits no pushing force, so admittance control goes deaf.

With a metre of slack the rope never tightens during the carry; the force
sensor reads zero and an admittance-only robot simply stands still.  The
adaptive interface sees the hand moving with no matching admittance
displacement, drives the adaptive index to one, and steers the reference
from the hand motion instead.

Run:  python3 demos/slack_rope_regime.py
"""

import numpy as np

from cocarry import load_scenario, run_scenario, scenario_path
from cocarry.kinematics import forward_kinematics

path = scenario_path("slack_rope")

cfg_adm = load_scenario(path, overrides={"mode": "admittance"})
records, _ = run_scenario(cfg_adm)
ee0 = forward_kinematics(cfg_adm.model, cfg_adm.q0).position
moved = max(np.linalg.norm(r.ee_pose.position - ee0) for r in records)
peak_force = max(np.linalg.norm(r.force) for r in records)
print("admittance only, slack rope")
print(f"  peak coupling force      : {peak_force:.4f} N")
print(f"  end-effector travel      : {moved * 100:.2f} cm  (the robot never hears the human)")

cfg = load_scenario(path)
records, metrics = run_scenario(cfg)
print("\nadaptive interface, same rope")
print(f"  completed waypoints      : {metrics.completed}")
print(f"  completion time          : {metrics.t_c:.2f} s")
print(f"  mean adaptive index      : {metrics.mean_alpha:.3f}  (near one: motion channel leads)")
for (lo, hi), a in zip(cfg.intervals, metrics.interval_alpha):
    print(f"    steady motion [{lo:.1f}, {hi:.1f}) s  alpha = {a:.3f}")
