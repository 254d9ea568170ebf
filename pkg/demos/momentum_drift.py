"""A 2-form built from Q components only: positions freeze, momenta drift.

With A = P = 0 the generated field has no q-component at all, so every
position is a constant of motion and the momenta slide linearly.  The
closed form is p(t) = p0 - t * (a q0) for Q_ij = -a_ij p.q, which the
integrator should hit at machine precision since the field is constant
along each trajectory.
"""

import numpy as np

from volflow import drift_system, integrate

a = np.array([[0.0, 0.25], [-0.25, 0.0]])
sys = drift_system(a)
x0 = sys.default_x0

print(f"coupling a =\n{a}")
print(f"x0 = {x0}  (q frozen at e_1, p starts at 0)\n")

traj = integrate(sys.field, x0, dt=1e-3, steps=2000, sample_every=400)
for t, x in zip(traj.times, traj.states):
    exact = sys.analytic(t, x0)
    print(f"  t = {t:4.1f}   q = {np.array2string(x[:2], precision=3)}"
          f"   p = {np.array2string(x[2:], precision=6)}"
          f"   |err| = {np.max(np.abs(x - exact)):.2e}")

print(f"\np2(2) = {traj.final_state[3]:+.6f}   (closed form: -t a_21 q1 = +0.5)")
