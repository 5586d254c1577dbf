"""Short boundary certificates, the long chain X and the final 3-cycles."""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field

from .cyclo import CycNumber
from .foxbar import (
    Chain,
    CommutatorProduct,
    bar_d,
    linearise_W,
    steinberg_symbol,
    linearisation_residual,
)
from .matrices import ExactMatrix, MatrixGroup
from .steinberg import (
    CommutatorRHS,
    ProofTrace,
    assemble_rhs,
    check_relators,
    commutator_factors,
    expand_h_commutator,
    lhs_decomposition,
)
from .words import SteinbergEvaluator, comm_ids, reduce_ids

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    pass


class CertificateError(RuntimeError):
    pass


class SimplificationViolation(CertificateError):
    pass


class DimensionError(ValueError):
    pass


class BoundaryCertificate:
    """A 3-chain together with its exactly verified boundary."""

    def __init__(self, chain: Chain, boundary: Chain, group: MatrixGroup, validate: bool = True):
        self.chain = chain
        self.boundary = boundary
        self.group = group
        if validate:
            self.validate()

    def validate(self) -> None:
        if bar_d(self.chain, self.group) != self.boundary:
            raise CertificateError("chain boundary differs from the claimed boundary")

    def scale(self, k: int) -> "BoundaryCertificate":
        return BoundaryCertificate(self.chain.scale(k), self.boundary.scale(k), self.group, validate=False)

    def __add__(self, other):
        return BoundaryCertificate(self.chain + other.chain, self.boundary + other.boundary, self.group, False)

    def __sub__(self, other):
        return BoundaryCertificate(self.chain - other.chain, self.boundary - other.boundary, self.group, False)


def _bar(terms) -> Chain:
    ch = Chain("bar")
    for t, c in terms:
        ch.add_term(t, c)
    return ch


def chain_bilinear(a: int, b: int, c: int, group: MatrixGroup) -> BoundaryCertificate:
    """[a|b|c] - [a|c|b] + [c|a|b] with boundary {a,c} + {b,c} - {ab,c}."""
    mul = group.mul
    if mul(a, c) != mul(c, a) or mul(b, c) != mul(c, b):
        raise PreconditionError("chain_bilinear needs c to commute with a and b")
    ch = _bar([((a, b, c), 1), ((a, c, b), -1), ((c, a, b), 1)])
    bd = steinberg_symbol(a, c) + steinberg_symbol(b, c) - steinberg_symbol(mul(a, b), c)
    return BoundaryCertificate(ch, bd, group)


def chain_order(a: int, b: int, n: int, group: MatrixGroup) -> BoundaryCertificate:
    """Sum of n bilinearity relations for a of order dividing n; boundary n{a,b}."""
    if n < 1:
        raise PreconditionError("n must be positive")
    e = group.e
    if group.evaluate((a,) * n) != e:
        raise PreconditionError("a^n is not the identity")
    if group.mul(a, b) != group.mul(b, a):
        raise PreconditionError("a and b must commute")
    ch = _bar([((e, e, b), 1), ((b, e, e), 1)])
    ar = a
    for _ in range(1, n):
        ch.add_term((ar, a, b), 1)
        ch.add_term((ar, b, a), -1)
        ch.add_term((b, ar, a), 1)
        ar = group.mul(ar, a)
    return BoundaryCertificate(ch, steinberg_symbol(a, b).scale(n), group)


def chain_swap(a: int, b: int, w: int, group: MatrixGroup) -> BoundaryCertificate:
    """Boundary 2{a,b} when w swaps the commuting pair a, b by conjugation."""
    mul, inv = group.mul, group.inv
    wi = inv(w)
    if mul(mul(w, a), wi) != b or mul(mul(w, b), wi) != a or mul(a, b) != mul(b, a):
        raise PreconditionError("chain_swap needs w a w^-1 = b, w b w^-1 = a, ab = ba")
    ch = _bar([
        ((w, a, b), 1), ((a, b, w), -1), ((w, b, a), -1),
        ((b, a, w), 1), ((a, w, a), 1), ((b, w, b), -1),
    ])
    return BoundaryCertificate(ch, steinberg_symbol(a, b).scale(2), group)


def pad_dimension(chain: Chain, src: MatrixGroup, dst: MatrixGroup) -> Chain:
    """Block-diagonal embedding of every matrix of ``chain`` into ``dst``."""
    if dst.dim < src.dim:
        raise DimensionError(f"cannot shrink dimension {src.dim} to {dst.dim}")
    cache: dict = {}

    def lift(g):
        h = cache.get(g)
        if h is None:
            h = dst.intern(src[g].pad(dst.dim))
            cache[g] = h
        return h

    out = Chain(chain.kind)
    for t, c in chain.terms.items():
        out.add_term(tuple(lift(g) for g in t), c)
    return out


def pad_certificate(cert: BoundaryCertificate, dst: MatrixGroup) -> BoundaryCertificate:
    return BoundaryCertificate(
        pad_dimension(cert.chain, cert.group, dst), pad_dimension(cert.boundary, cert.group, dst), dst
    )


# -- the matrices of the short examples -------------------------------------------

def example_matrices(u: CycNumber, v: CycNumber | None = None) -> dict:
    """3x3 matrices a, b, w, c used by the short examples."""
    F = u.field
    one, zero = F.one(), F.zero()
    if v is None:
        v = one
    ui = u.inverse()
    return {
        "a": ExactMatrix.diagonal(F, [u, ui, one]),
        "b": ExactMatrix.diagonal(F, [u, one, ui]),
        "w": ExactMatrix.from_rows(F, [[one, zero, zero], [zero, zero, v], [zero, -v.inverse(), zero]]),
        "c": ExactMatrix.diagonal(F, [-one, one, -one]),
    }


def torsion_cycle(u: CycNumber, n: int, group: MatrixGroup | None = None) -> tuple:
    """n Z_1 - 2 Z_2 from the swap and order certificates; returns (chain, group)."""
    F = u.field
    if u ** n != F.one():
        raise PreconditionError("u^n must be 1")
    g3 = MatrixGroup(F, 3)
    m = example_matrices(u)
    a, b, w = (g3.intern(m[k]) for k in "abw")
    z1 = chain_swap(a, b, w, g3)
    z2 = chain_order(a, b, n, g3)
    cyc = z1.chain.scale(n) - z2.chain.scale(2)
    if not bar_d(cyc, g3).is_zero():
        raise CertificateError("torsion chain is not a cycle")
    if group is not None:
        cyc = pad_dimension(cyc, g3, group)
        g3 = group
    return cyc, g3


# -- the long chain X -------------------------------------------------------------

@dataclass
class XStats:
    proof_factors: int = 0
    relator_counts: dict = field(default_factory=dict)
    commutators: int = 0
    commutators_per_kind: dict = field(default_factory=dict)
    tuples: int = 0
    matrices: int = 0
    residual_checked: int = 0
    seconds: float = 0.0


@dataclass
class XResult:
    cert: BoundaryCertificate
    A: int
    B: int
    stats: XStats
    trace: ProofTrace | None = None
    rhs: CommutatorRHS | None = None


def _rhs_products(rhs: CommutatorRHS, group: MatrixGroup) -> list:
    ev = SteinbergEvaluator(group)
    out = []
    for K, v, eps in rhs.factors:
        Ki = reduce_ids(ev.to_ids(K))
        vi = reduce_ids(ev.to_ids(v))
        cp = CommutatorProduct(commutator_factors(Ki, vi, eps, group))
        out.append((Ki, vi, eps, cp))
    return out


def build_X(u: CycNumber, group: MatrixGroup | None = None, residual: str = "sample",
            sample: int = 100, seed: int = 0) -> XResult:
    """X = W(RHS) - W(LHS) with bar_d(X) = {A, B}.

    ``residual`` is "full", "sample" or "none": how many right-hand commutators
    get an independent linearisation residual check (the LHS is always checked).
    """
    t0 = time.perf_counter()
    if group is None:
        group = MatrixGroup(u.field, 5)
    if group.dim < 5:
        raise DimensionError("X needs dimension 5")
    trace = expand_h_commutator(u)
    if not check_relators(trace, group):
        raise CertificateError("a recorded relator is not the identity")
    rhs = assemble_rhs(u, group, trace)
    lhs = lhs_decomposition(u, group)
    prods = _rhs_products(rhs, group)

    # matrix-level free identity
    word: list = []
    for Ki, vi, eps, _ in prods:
        c = comm_ids(Ki, vi)
        word.extend(c if eps > 0 else tuple(-x for x in reversed(c)))
    if reduce_ids(word) != reduce_ids(comm_ids(lhs.w_B, lhs.w_A)):
        raise CertificateError("right-hand side is not freely equal to [w_B, w_A]")

    res = linearisation_residual(lhs.product, group)
    if not res.is_zero():
        raise CertificateError("linearisation residual of the left-hand side is nonzero")
    idx = range(len(prods))
    if residual == "sample":
        idx = sorted(random.Random(seed).sample(range(len(prods)), min(sample, len(prods))))
    elif residual == "none":
        idx = []
    for k in idx:
        if not linearisation_residual(prods[k][3], group).is_zero():
            raise CertificateError(f"linearisation residual of commutator {k} is nonzero")

    X = Chain("bar")
    for *_, cp in prods:
        X.iadd(linearise_W(cp, group))
    X.iadd(linearise_W(lhs.product, group), -1)
    A, B = lhs.A, lhs.B
    cert = BoundaryCertificate(X, steinberg_symbol(A, B), group)
    stats = XStats(
        proof_factors=len(trace),
        relator_counts=trace.relator_counts(),
        commutators=len(rhs),
        commutators_per_kind=rhs.counts["commutators_per_kind"],
        tuples=len(X),
        matrices=len(X.matrix_ids()),
        residual_checked=len(idx),
        seconds=time.perf_counter() - t0,
    )
    return XResult(cert, A, B, stats, trace, rhs)


def simplify_chain(cert: BoundaryCertificate) -> BoundaryCertificate:
    """Boundary-preserving clean-up; every pass is re-verified or rolled back."""
    g = cert.group
    # pass 1: coefficient cancellation (Chain keeps no zero coefficients)
    cur = BoundaryCertificate(Chain("bar", cert.chain.terms), cert.boundary, g)
    # pass 2: drop the degenerate part when it is itself a cycle
    e = g.e
    deg = Chain("bar", {t: c for t, c in cur.chain.terms.items() if e in t})
    if deg and bar_d(deg, g).is_zero():
        cand = cur.chain - deg
        try:
            cur = BoundaryCertificate(cand, cur.boundary, g)
        except CertificateError:
            log.warning("degenerate pass rolled back")
    if len(cur.chain) > len(cert.chain):
        raise SimplificationViolation("simplification grew the chain")
    return cur


# -- final cycles --------------------------------------------------------------------

@dataclass
class CycleResult:
    chain: Chain
    group: MatrixGroup
    variant: str
    n: int
    x: XResult
    short: BoundaryCertificate
    x_simplified: BoundaryCertificate


def short_certificate(u: CycNumber, variant: str, n: int, group: MatrixGroup) -> BoundaryCertificate:
    """Y (boundary 2{A,B}) or Z (boundary n{A,B}) built at N=3, padded to the group."""
    F = u.field
    g3 = MatrixGroup(F, 3)
    m = example_matrices(u)
    A = g3.intern(m["a"])
    B = g3.intern(ExactMatrix.diagonal(F, [-u, F.one(), -u.inverse()]))
    if variant == "Z-nX":
        cert = chain_order(A, B, n, g3)
    elif variant == "Y-2X":
        b, w, c = (g3.intern(m[k]) for k in "bwc")
        if g3.mul(c, b) != B:
            raise CertificateError("unexpected factorisation of B")
        y = chain_swap(A, b, w, g3) - chain_order(c, A, 2, g3) + chain_bilinear(c, b, A, g3).scale(2)
        cert = BoundaryCertificate(y.chain, steinberg_symbol(A, B).scale(2), g3)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return pad_certificate(cert, group)


def build_cycle(u: CycNumber, variant: str = "Z-nX", n: int = 3, residual: str = "sample",
                x: XResult | None = None) -> CycleResult:
    F = u.field
    if variant == "Z-nX" and u ** n != F.one():
        raise PreconditionError(f"variant Z-nX needs u^{n} = 1")
    k = 2 if variant == "Y-2X" else n
    if x is None:
        x = build_X(u, residual=residual)
    group = x.cert.group
    short = short_certificate(u, variant, n, group)
    if short.boundary != x.cert.boundary.scale(k):
        raise CertificateError("short certificate does not match k{A,B}")
    xs = simplify_chain(x.cert)
    cyc = short.chain - xs.chain.scale(k)
    if not bar_d(cyc, group).is_zero():
        raise CertificateError("assembled chain is not a cycle")
    return CycleResult(cyc, group, variant, k, x, short, xs)
