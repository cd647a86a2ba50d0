"""
Refuting embeddings that fail
=============================

For a failing tuple the engine builds a family of test functions on which
the relevant quantity grows without bound, and stops once it has grown by
a factor of 1000.
"""
import json

from sobolev_oracle.params import Q, EmbeddingParams
from sobolev_oracle.verify import refute

P = EmbeddingParams.of
cases = [
    P(3, 0, 5, 1, 2, 2),               # a = 0
    P(3, 2, 0, 2, 2, 2),               # c above the admissible interval
    P(3, 2, -2, -4, 2, 2),             # c on the wrong side of -N
    P(3, 1, 0, 5, 2, 12),              # interpolation exponent too large
    P(3, 1, 0, Q(-9, 4), 2, Q(3, 2)),  # endpoint c with r < p
]

for prm in cases:
    ev = refute(prm)
    print(f"{ev.failure.value:28s} {ev.mechanism.value:34s} "
          f"growth {ev.growth_factor:9.3g} after {len(ev.witness_sequence)} steps")

# the evidence is plain JSON; for a = 0 it also records which norms are finite
doc = refute(cases[0]).to_json()
print(json.dumps(doc["membership"], indent=2))
