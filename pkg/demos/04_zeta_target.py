"""zeta*_F(-1) for F = Q(zeta_3) three ways: Hurwitz values by Euler-Maclaurin,
mpmath's own Hurwitz zeta, and the Dirichlet series of ideal counts."""
import mpmath

from borel_cycles.zeta import ZETA_STAR_PUBLISHED, zeta_F2, zeta_F2_bruteforce, zeta_star_minus1

z = zeta_F2(120)
ref = mpmath.zeta(2) * (mpmath.zeta(2, mpmath.mpf(1) / 3) - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
print("zeta_F(2), Euler-Maclaurin:", mpmath.nstr(z, 25))
print("zeta_F(2), mpmath        :", mpmath.nstr(ref, 15))
print("zeta_F(2), ideal counts  :", f"{zeta_F2_bruteforce(10**6):.15f}")
print("zeta*_F(-1)              :", mpmath.nstr(zeta_star_minus1(120), 25))
print("difference to published   :", f"{abs(float(zeta_star_minus1(120)) - ZETA_STAR_PUBLISHED):.1e}")
