"""Short 3-chains over Q(zeta_3): the bilinearity, order and swap certificates,
and the torsion cycle they combine into, whose regulator vanishes."""
from borel_cycles.cyclo import make_field
from borel_cycles.cycles import chain_bilinear, chain_order, chain_swap, example_matrices, torsion_cycle
from borel_cycles.foxbar import bar_d
from borel_cycles.matrices import MatrixGroup
from borel_cycles.regulator import evaluate

F = make_field(3)
u = F.zeta(1)
g = MatrixGroup(F, 3)
m = {k: g.intern(v) for k, v in example_matrices(u).items()}
a, b, w, c = m["a"], m["b"], m["w"], m["c"]

for name, cert in (("bilinear", chain_bilinear(a, b, c, g)),
                   ("order", chain_order(a, b, 3, g)),
                   ("swap", chain_swap(a, b, w, g))):
    print(f"{name:8s} {len(cert.chain):2d} tuples, boundary has {len(cert.boundary)} terms, "
          f"exact: {bar_d(cert.chain, g) == cert.boundary}")

# 3 * swap - 2 * order has boundary 3*2{a,b} - 2*3{a,b} = 0
cyc, g = torsion_cycle(u, 3)
print("torsion cycle:", len(cyc), "tuples, boundary zero:", bar_d(cyc, g).is_zero())
res = evaluate(cyc, g, 6)
print("regulator series up to m=6:", res.value, "tail", res.tail_estimate)
