"""
Deciding embeddings exactly
===========================

Every question is a tuple (N, a, b, c, p, r).  The answer is computed with
exact rationals, so boundary cases are decided without rounding.
"""
from sobolev_oracle.decision import decide_c_zero_th17, decide_embedding
from sobolev_oracle.params import Q, EmbeddingParams, derive, kelvin_dual

P = EmbeddingParams.of

# a holding tuple: the verdict carries the case and the interpolation exponent
v = decide_embedding(P(3, 2, 0, 0, 2, 2))
print("holds:", v.holds, "case:", v.case_label.value, "theta:", v.inequality.theta)

# the derived exponents behind it
d = derive(P(3, 2, 0, 0, 2, 2))
print("p* =", d.p_star, " c0 =", d.c0, " c1 =", d.c1, " theta_c =", d.theta_c)

# a failing tuple names the first necessary condition it violates
v = decide_embedding(P(3, 0, 5, 1, 2, 2))
print("holds:", v.holds, "reason:", v.failure.tag.value)

# inversion x -> x/|x|^2 maps the question to an equivalent one
prm = P(3, 1, 0, Q(-9, 4), 2, Q(3, 2))
dual = kelvin_dual(prm)
show = lambda q: "(" + ", ".join(str(x) for x in q.as_tuple()) + ")"
print("dual of", show(prm), "is", show(dual))
print("same answer:", decide_embedding(prm).holds == decide_embedding(dual).holds)

# with c = 0 an independent characterisation gives the same answers
for b in (Q(-1), Q(0), Q(1, 2), Q(1)):
    prm = P(3, 1, b, 0, 2, 4)
    print(f"b = {b}:", decide_embedding(prm).holds, decide_c_zero_th17(prm).holds)
