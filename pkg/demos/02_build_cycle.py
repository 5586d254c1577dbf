"""Builds X with boundary {A, B} from the Steinberg proof of [h13, h12] and
assembles the homology classes Z - 3X and Y - 2X (takes about ten seconds)."""
import time

from borel_cycles.cyclo import make_field
from borel_cycles.cycles import build_cycle, build_X
from borel_cycles.foxbar import bar_d, steinberg_symbol
from borel_cycles.words import unit_names

F = make_field(3)
u = F.zeta(1)
t0 = time.perf_counter()
x = build_X(u, residual="sample", sample=100)
s = x.stats
print(f"proof of [h13, h12]: {s.proof_factors} conjugated relators {s.relator_counts}")
print("first three factors:")
for item in x.trace.dump(unit_names(u))[:3]:
    print("   ", item["relator"], "conjugated by", item["conjugator"] or "1")
print(f"commutators [K, v]: {s.commutators}  (per relator kind {s.commutators_per_kind})")
print(f"X: {s.tuples} bar tuples over {s.matrices} matrices; "
      f"{s.residual_checked} sampled residual checks; {time.perf_counter() - t0:.1f}s")
print("d(X) == {A, B}:", bar_d(x.cert.chain, x.cert.group) == steinberg_symbol(x.A, x.B))

for variant in ("Z-nX", "Y-2X"):
    cyc = build_cycle(u, variant, 3, x=x)
    print(f"{variant.replace('n', str(cyc.n))}: {len(cyc.chain)} tuples, "
          f"boundary zero: {bar_d(cyc.chain, cyc.group).is_zero()}")
