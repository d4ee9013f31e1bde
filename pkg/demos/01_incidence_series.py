# %% [markdown]
# # Incidence series over Z((t))
#
# A return map h on the fiber chain group, a disc class X and a covector
# lambda give n_k = lambda(h^k X).  The closed form comes from Cramer's rule
# with det(I - h t) in the denominator; Berlekamp-Massey recovers it from
# the coefficients alone.

# %%
from novikov.laurent import (
    LaurentSeries, cramer_series, expand_rational, iterate_pairing, reconstruct_rational,
)

h = [[1, 1], [1, 0]]
X = [1, 0]
lam = [1, 0]

print(iterate_pairing(h, X, lam, 12))

# %%
r = cramer_series(h, X, lam)
print(r)                      # 1 / (1 - t - t^2)
print(expand_rational(r, 12))

# %% [markdown]
# Reconstruction needs enough known terms; with too few it refuses rather
# than guess.

# %%
s = LaurentSeries.make(0, iterate_pairing(h, X, lam, 8), 8)
back = reconstruct_rational(s)
print(back, back.same_function(r))

from novikov.errors import InsufficientDataError

try:
    reconstruct_rational(LaurentSeries.make(0, [1, 1, 2], 2))
except InsufficientDataError as e:
    print("refused:", e)

# %% [markdown]
# The same computation from a problem file, the format the CLI reads.

# %%
from pathlib import Path

from novikov.chains import incidence_rational, incidence_series
from novikov.serialize import load_problem

d = load_problem(str(Path(__file__).parent / "data" / "fibonacci.json"))
print(incidence_series(d, "x", "y", 10))
print(incidence_rational(d, "x", "y"))
