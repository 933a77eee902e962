"""Right at the dimension threshold the recognition statement fails.

WA_{6,1,3} over GF(2) has upper-rank 4 and dimension 8, exactly the
threshold for n = 6, r = 4, yet it is congruent to a subspace of neither
WA_{6,2,1} nor WA_{6,0,5}.  One dimension more and every space is caught.
"""
from brkit.field import field_make
from brkit.models import CompressionModel, model_space, thresholds
from brkit.recognize import oracle_recognize, recognize
from brkit.space import urk
from brkit.verify import sample_bounded_space

F = field_make(2)
S = model_space(CompressionModel("alt", 6, 1, 3), F)
print(f"WA_{{6,1,3}}: dim {S.dim}, upper-rank {urk(S).value}, threshold {thresholds('alt', 6, 4).new_thm}")
for target in (CompressionModel("alt", 6, 2, 1), CompressionModel("alt", 6, 0, 5)):
    out = oracle_recognize(S, target)
    print(f"  inside {target}? {out.verdict} ({out.stats['flags_tested']} candidate vectors tested)")

guided = recognize(S, 4, mode="guided", check=False)
print("guided recursion:", guided.verdict, "-", guided.reason)

print("\none dimension above the threshold:")
for seed in range(4):
    model = CompressionModel("alt", 6, 2, 1) if seed % 2 else CompressionModel("alt", 6, 0, 5)
    T = sample_bounded_space(model, 9, F, seed).space
    out = recognize(T, 4)
    print(f"  seed {seed}: sampled from {model}, certified into {out.model}")
