"""
One-dimensional checks behind the results
=========================================

A weighted Hardy inequality, the bound of a function by the integral of its
derivative, the identities of the power transform u -> |u|^(r/p*) and
radial symmetrisation are checked numerically on explicit functions.
"""
import numpy as np

from sobolev_oracle.params import EmbeddingParams
from sobolev_oracle.testfun import (
    Cutoff, Indicator, LogBump, angular_hemisphere, power, product, separable,
)
from sobolev_oracle.verify import (
    hardy_check, hardy_constant, lemma5_check, lemma14_identity_check, symmetrization_check,
)

# Hardy: lhs <= C rhs, with C = p / (-alpha - 1) sharp
g = product(power(1), Indicator(0.0, 1.0))
lhs, rhs = hardy_check(-3, 2, g)
print("Hardy lhs, rhs:", lhs, rhs, " ratio:", lhs / rhs, " sharp constant:", hardy_constant(-3, 2))
# the inequality is invariant under dilation, so moving a log-bump changes nothing
for centre in (-1.0, 0.0, 1.0):
    lhs, rhs = hardy_check(-3, 2, LogBump(centre, 1.0))
    print(f"  log-bump at {centre:+.0f}: ratio {lhs / rhs:.6f}")

# |f(t)| <= int_0^t |f'| for profiles vanishing at 0
print("derivative bound:", lemma5_check(product(power(1), Cutoff()), np.exp(np.linspace(-4, 4, 9))))

# power transform with p < N and r > p*
rep = lemma14_identity_check(LogBump(0.0, 1.0), EmbeddingParams.of(3, 0.5, 1, 0, 2, 7))
print("sup identity:", rep.sup_identity_ok, " gradient bound:", rep.grad_bound_ok)

# symmetrisation does not increase the norms of a separable function
u = separable(LogBump(0.0, 1.0), angular_hemisphere())
print("symmetrisation:", symmetrization_check(u, EmbeddingParams.of(3, 2, 0, 0, 2, 2)))
