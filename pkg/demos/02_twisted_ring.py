# %% [markdown]
# # The twisted Novikov ring
#
# G = Z^m x| Z with theta h theta^-1 = Phi(h).  Here m = 1 and Phi = -1, so
# theta inverts h.  A semilinear endomorphism xi of a free module gives the
# series sum_k lambda(xi^k x) theta^k, which has a closed type (L) form and
# an explicit growth certificate.

# %%
from novikov.semilinear import SemilinearEndo, direct_series, summed_series
from novikov.twisted import (
    NovikovElt, TwistedGroup, ZH, check_exponential_growth, growth_constants_for_typeL,
)

G = TwistedGroup(1, ((-1,),))
h = ZH.mono((1,))
one = ZH.const(1, 1)

theta = NovikovElt.from_coeff(G, one, 1, trunc=6)
hh = NovikovElt.from_coeff(G, h, 0, trunc=6)
print(theta * hh)   # h^-1 theta
print(hh * theta)   # h theta

# %%
xi = SemilinearEndo(G, ((h, one), (one, ZH(1))))
x = (one, ZH(1))
lam = (one, h)

T, s = summed_series(xi, lam, x, 8)
print(s)
print(s == direct_series(xi, lam, x, 8))

# %% [markdown]
# The certificate (A, B, N) bounds the l1 norm of the level -k coefficient
# by A * N^k; B is a rational upper bound for ln N.

# %%
cert = growth_constants_for_typeL(T)
print(cert)
print(check_exponential_growth(summed_series(xi, lam, x, 20)[1], cert.A, cert.B))
