"""
Weighted norms and divergence certificates
==========================================

Norms of radial profiles are integrated in log-radius.  Whether an integral
is finite is read off the profile's power expansions before any number is
computed, so a divergent norm comes back with the exponent that causes it.
"""
import math

from sobolev_oracle.params import EmbeddingParams
from sobolev_oracle.quad import membership_norms, weighted_lr_norm, weighted_sup_norm
from sobolev_oracle.testfun import Constant, Cutoff, Indicator, add, power, product

# 1 on (0, 1] and t^-2 beyond, on the line: the L^1 norm is exactly 4
f = add(Indicator(0, 1), product(power(-2), Indicator(1, math.inf)))
res = weighted_lr_norm(f, 0, 1, 1, 2.0, tol=1e-12)
print("norm:", res.value, "status:", res.status.value)

# a smooth cutoff in R^3 with weight |x|^0 and r = 2
res = weighted_lr_norm(Cutoff(), 0, 2, 3, tol=1e-12)
print("||zeta||_2 in R^3:", res.value, "+/-", res.abs_error)

# constants are not integrable at infinity; the certificate says why
res = weighted_lr_norm(Constant(1.0), 0, 2, 3)
cert = res.certificate
print("status:", res.status.value, "end:", cert.end, "integrand exponent:", cert.integrand_exponent)

# sup |x|^a |u| for a = 1/2
print("sup t^(1/2) zeta:", weighted_sup_norm(Cutoff(), 0.5).value)

# the three norms that decide membership, for one parameter tuple
trip = membership_norms(product(power(1), Cutoff()), EmbeddingParams.of(3, 2, 0, 0, 2, 2))
for name in ("target_norm", "sup_norm", "grad_norm"):
    print(name, getattr(trip, name).value)
