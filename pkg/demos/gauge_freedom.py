"""Shifting alpha by an exact form d(beta) leaves the generated field alone.

Only d(alpha) enters the construction, so alpha is defined up to any
closed form; adding d(beta) for an arbitrary 1-form beta is the easy way
to exercise that freedom.  The shifted 2-form has visibly different
components, yet the field is unchanged to rounding.
"""

import numpy as np

from volflow import (
    OneFormField,
    TwoFormField,
    gauge_shift,
    generate,
    poly_variables,
)

n = 2
q, p = poly_variables(n)

alpha = TwoFormField(
    n,
    A={(0, 1): q[0] * p[0], (1, 1): q[1]},
    P={(0, 1): p[0] + q[1]},
)
beta = OneFormField.from_components(
    n,
    dq={0: q[1] * p[0] * 0.8, 1: p[1] * p[1]},
    dp={0: q[0] * q[1], 1: (q[0] + p[0]) * 0.5},
)
shifted = gauge_shift(alpha, beta)

print("components before and after the shift (they differ):")
before = {(kind, i, j) for kind, i, j, _ in alpha.components()}
after = {(kind, i, j) for kind, i, j, _ in shifted.components()}
print(f"  alpha slots:         {sorted(before)}")
print(f"  alpha + d beta slots: {sorted(after)}")

X = generate(alpha)
Y = generate(shifted)
rng = np.random.default_rng(4)
pts = rng.normal(size=(100, 2 * n))
gap = float(np.max(np.abs(X(pts) - Y(pts))))
print(f"\nmax |X_alpha - X_(alpha + d beta)| over 100 points: {gap:.3e}")

x = pts[0]
print(f"\nexample at x = {np.array2string(x, precision=3)}:")
print(f"  from alpha:          {np.array2string(X(x), precision=10)}")
print(f"  from shifted 2-form: {np.array2string(Y(x), precision=10)}")
