# %% [markdown]
# # Time near a nondegenerate zero
#
# For v(x, y) = (-x, y) every trajectory spends at most ln(q + sqrt(q^2 - 1))
# in the annulus r <= |z| <= R with q = (R/r)^2, and at most 2 in the slice
# |Q| <= r^2 outside the ball of radius r.

# %%
import numpy as np

from novikov.flow.standard import (
    annulus_time_bound, quadratic_slice_time, random_sphere_point, standard_gradient_times,
)

R, r = 2.0, 1.0
print("bound", annulus_time_bound(R, r))

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    z = random_sphere_point(rng, 4, R)
    rep = standard_gradient_times(R, r, z, 2)
    worst = max(worst, rep.time / rep.bound)
print("worst time / bound", worst)

# %%
slices = [quadratic_slice_time(r, random_sphere_point(rng, 3, 1.5), 1).time for _ in range(200)]
print("longest slice time", max(slices))
