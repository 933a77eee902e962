"""In characteristic 2 an alternating matrix is also symmetric.

Symmetric spaces of upper-rank r over GF(4) can therefore land in the
alternating model WA_{n,0,r+1}, which has upper-rank r as well.
"""
from brkit.field import field_make
from brkit.models import CompressionModel
from brkit.recognize import recognize
from brkit.space import urk
from brkit.verify import sample_bounded_space

F = field_make(4)
for n, d, seed in [(5, 9, 0), (5, 10, 1), (6, 10, 2)]:
    smp = sample_bounded_space(CompressionModel("alt", n, 0, 5), d, F, seed)
    S = smp.space.as_kind("sym")
    out = recognize(S, 4)
    print(f"n={n} dim={S.dim} urk={urk(S).value}: {out.verdict} into {out.model}")
    print("    " + "\n    ".join(out.trace))
