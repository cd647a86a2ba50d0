"""
Scale invariance of the multiplicative ratio
============================================

When an embedding holds, the ratio of the target norm to the product of the
gradient and sup norms (with the verdict's exponent theta) does not change
under u -> u(lambda x).  Any other theta leaves a power of lambda behind.
"""
from sobolev_oracle.decision import decide_embedding
from sobolev_oracle.params import Q, EmbeddingParams
from sobolev_oracle.testfun import Cutoff
from sobolev_oracle.verify import best_constant_estimate, scale_invariance_check

prm = EmbeddingParams.of(3, 2, 0, 0, 2, 2)
theta = decide_embedding(prm).inequality.theta

rep = scale_invariance_check(prm)
print("theta:", theta, "profiles:", sorted(rep.spread_by_profile))
print("spread over lambda in 1e-3..1e3:", rep.scale_invariance_spread)

# nudging theta breaks the invariance by a visible factor
bad = scale_invariance_check(prm, {"zeta": Cutoff()}, theta=theta + Q(1, 10))
print("spread with theta + 1/10:", bad.scale_invariance_spread)
for _, lam, val in bad.ratios:
    print(f"  lambda = {lam:g}: ratio {val:.6g}")

# a lower bound on the best constant from a family of truncated powers
for size in (4, 8, 16):
    est = best_constant_estimate(prm, size=size)
    print(f"best constant >= {est.value:.6f} (family of {size}, best {est.argmax})")
