"""Membership-oracle convex bodies: composition, Monte-Carlo Gaussian
measure, rejection-sampled barycenters, and gauge evaluation.
"""

import numpy as np
from scipy.special import ndtri

from vecbal import (
    ball,
    barycenter,
    cube,
    gauge_norm,
    gaussian_measure,
    halfspace,
    intersect,
    restrict,
    shifted,
    symmetrize,
)

# a cube calibrated so its Gaussian measure is exactly 1/2
d = 3
a = float(ndtri((1 + 0.5 ** (1 / d)) / 2))
box = cube(a, d)
est = gaussian_measure(box, 400_000, seed=0)
print(f"cube half-width {a:.4f}: measure {est.p_hat:.4f} +- {est.ci_halfwidth:.4f}")

# composition: shifted cube cut by a halfspace, then symmetrized
body = intersect(shifted(box, [0.2, 0.0, 0.0]), halfspace([1.0, 0.0, 0.0], 1.0))
print("asymmetric intersection measure:",
      round(gaussian_measure(body, 400_000, seed=1).p_hat, 4))
sym = symmetrize(body)
print("symmetrized measure:           ",
      round(gaussian_measure(sym, 400_000, seed=2).p_hat, 4))

# barycenter of the negative halfline is -sqrt(2/pi)
halfline = halfspace([1.0], 0.0)
b = barycenter(halfline, delta=0.02, epsilon=0.05, seed=3)
print(f"\nhalfline barycenter: {b.b_hat[0]:+.4f}  (exact {-np.sqrt(2 / np.pi):+.4f}; "
      f"{b.samples_used} accepted points, {b.rejection_failures} rejections)")

# slices of a ball are balls of the same radius
disk = restrict(ball(1.0, dim=3), np.eye(3)[:, :2], np.zeros(3))
print("\nslice membership: (0.6, 0.7) ->", disk.contains(np.array([0.6, 0.7])),
      ", (0.8, 0.7) ->", disk.contains(np.array([0.8, 0.7])))

# gauges: Euclidean norm for the ball, scaled sup-norm for the cube
print("\ngauge of (3,4) in the unit ball:", gauge_norm(ball(1.0, dim=2), [3.0, 4.0]).value)
print("gauge of (1,-3) in [-2,2]^2:    ", gauge_norm(cube(2.0, 2), [1.0, -3.0]).value)
res = gauge_norm(halfspace([1.0, 0.0], 1.0), [-5.0, 0.0])
print("recession direction:             value", res.value, "unbounded", res.unbounded)
