# %% [markdown]
# # Flow lines on the torus, counted two ways
#
# F(x, y) = x + small Fourier terms is circle valued.  Route A traces
# descending and ascending branches of the index-1 points through copies of
# the fundamental cobordism.  Route B transports fiber arcs once, which gives
# h, X and lambda, and then iterates algebraically.

# %%
from novikov.chains import incidence_rational, incidence_series, novikov_betti_numbers
from novikov.flow.cobordism import Cobordism, adjacent_pairs, count_table
from novikov.flow.condition_c import compute_return_endomorphism
from novikov.flow.scenarios import TORUS_4PT

cob = Cobordism(TORUS_4PT)
for c in cob.crit:
    print(f"{c.name}  index {c.index}  ({c.x:.6f}, {c.y:.6f})  F = {c.value:.6f}")
print("cut level", cob.c0)

# %%
rd = compute_return_endomorphism(cob, delta=0.1)
print("condition (C) margins", rd.witness.margin_B1, rd.witness.margin_B0)
d = rd.integer()

for p, q in adjacent_pairs(cob):
    geo = count_table(cob, p, q, 8)
    alg = incidence_series(d, p, q, 8).coefficients(-1, 8)
    print(p, q, geo, "agree" if geo == alg else "DIFFER", incidence_rational(d, p, q))

# %% [markdown]
# The two nonzero incidences are t^-1 (1 - t), so the boundary maps are
# invertible over Q((t)) and the Novikov homology vanishes, as it must for a
# map homotopic to a fibration.

# %%
print(novikov_betti_numbers(d))

# %% [markdown]
# Perturbing the field away from the critical points leaves the counts alone.

# %%
import numpy as np

from novikov.flow.perturb import perturb_and_recount, random_admissible_bumps

bumps = random_admissible_bumps(cob, np.random.default_rng(1), 3)
for b in bumps:
    print(perturb_and_recount(cob, [b], 4).identical)
