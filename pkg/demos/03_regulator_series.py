"""The regulator power series: the single appendix tuple against its closed
form, then the Z - 3X cycle for increasing m against the zeta target."""
import sys

from borel_cycles.cli import report_table
from borel_cycles.cyclo import make_field
from borel_cycles.cycles import build_cycle
from borel_cycles.foxbar import psi
from borel_cycles.regulator import appendix_tuple_exact, appendix_value_exact, evaluate, evaluate_tuples, preprocess
from borel_cycles.zeta import regulator_target

ch, g = appendix_tuple_exact()
r = evaluate(ch, g, 2)
print(f"appendix tuple, m = 1..2: {r.value.imag:.17e} i")
print(f"closed form -64 sqrt3/(3+sqrt5)^8: {float(appendix_value_exact()):.17e}")

m_max = int(sys.argv[1]) if len(sys.argv) > 1 else 4
u = make_field(3).zeta(1)
cyc = build_cycle(u, "Z-nX", 3, residual="none")
tuples = preprocess(psi(cyc.chain, cyc.group), cyc.group)
print(f"\nZ-3X: {len(tuples)} standard 4-tuples after dropping and merging")
res = evaluate_tuples(tuples, m_max)
for m, c in enumerate(res.partials, 1):
    print(f"  term m={m}: {c.imag:+.6f} i")
print(report_table(res, float(regulator_target())))
