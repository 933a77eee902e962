"""Hide a compression space behind a random change of basis, then find it again.

    python demos/recognize_walkthrough.py [seed]
"""
import sys

import numpy as np

from brkit import matrix as mx
from brkit.field import field_make
from brkit.models import CompressionModel, model_dim, thresholds
from brkit.recognize import recognize, verify_cert
from brkit.space import urk
from brkit.verify import sample_bounded_space

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
F = field_make(3)
hidden = CompressionModel("sym", 6, 2, 0)
th = thresholds("sym", 6, 4)

smp = sample_bounded_space(hidden, model_dim(hidden) - 1, F, seed)
S = smp.space
print(f"S: {S.dim}-dimensional space of 6x6 symmetric matrices over GF(3)")
print(f"upper-rank {urk(S).value}; recognition needs dim > {th.new_thm}")
print("first basis matrix:\n", S.basis[0])

out = recognize(S, 4)
print("\nverdict:", out.verdict, "->", out.model)
print("trace:")
for line in out.trace:
    print("   ", line)
print("P =\n", out.cert.P)
print("P M P^T for the first basis matrix:\n", mx.congruence(F, out.cert.P, S.basis[0]))
print("certificate checks out:", verify_cert(S, out.cert))
print("hyperplanes scanned:", out.stats["hyperplanes_scanned"])
