"""Recorded rewriting in free groups on Steinberg generators.

Two kinds of certified rewriting are used.

* Proof traces: a word is rewritten using the Steinberg relators S, T, U.
  Each step replaces a subword L by M and records L M^{-1} as a product of
  conjugated relators, so that ``original = prod(c R^eps c^-1) * current``
  holds in the free group.
* Commutator rewriting: the same bookkeeping, but each recorded factor is a
  commutator [K, v]^{+-1} with K a relator (matrix level).  This is what the
  linearisation W needs.

Everything is validated by free reduction; relator claims are validated by
exact matrix evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .cyclo import CycNumber
from .matrices import MatrixGroup
from .words import (
    StGen,
    SteinbergEvaluator,
    comm,
    conj,
    free_reduce,
    invert,
    render_scalar,
    render_word,
)


class RewriteError(RuntimeError):
    pass


class NonUnitError(ValueError):
    pass


VALIDATE = True


def x(i: int, j: int, lam: CycNumber):
    return (StGen(i, j, lam), 1)


def xi(i: int, j: int, lam: CycNumber):
    return (StGen(i, j, lam), -1)


def _check_unit(u: CycNumber):
    if u.is_zero():
        raise NonUnitError("parameter must be a unit")


# -- relators ----------------------------------------------------------------

class Rel(NamedTuple):
    kind: str          # "S", "T" or "U"
    idx: tuple
    a: CycNumber
    b: CycNumber

    def word(self) -> tuple:
        return rel_word(self)

    def render(self, names: dict | None = None) -> str:
        sub = "".join(str(t) for t in self.idx)
        return f"{self.kind}_{{{sub}}}^{{{render_scalar(self.a, names)},{render_scalar(self.b, names)}}}"


@lru_cache(maxsize=None)
def rel_word(r: Rel) -> tuple:
    a, b = r.a, r.b
    if r.kind == "S":
        i, j = r.idx
        return (xi(i, j, a + b), x(i, j, a), x(i, j, b))
    if r.kind == "T":
        i, j, k = r.idx
        if i == k or i == j or j == k:
            raise RewriteError(f"invalid T indices {r.idx}")
        return (x(i, j, a), x(j, k, b), xi(i, j, a), xi(j, k, b), xi(i, k, a * b))
    if r.kind == "U":
        i, j, k, l = r.idx
        if i == l or j == k:
            raise RewriteError(f"invalid U indices {r.idx}")
        return (x(i, j, a), x(k, l, b), xi(i, j, a), xi(k, l, b))
    raise RewriteError(f"unknown relator kind {r.kind}")


def S(i, j, a, b):
    return Rel("S", (i, j), a, b)


def T(i, j, k, a, b):
    return Rel("T", (i, j, k), a, b)


def U(i, j, k, l, a, b):
    return Rel("U", (i, j, k, l), a, b)


# -- lemma objects -----------------------------------------------------------

def trace_value(items) -> tuple:
    out: list = []
    for c, r, eps in items:
        w = r.word() if eps > 0 else invert(r.word())
        out.extend(c)
        out.extend(w)
        out.extend(invert(c))
    return tuple(out)


def comm_value(items) -> tuple:
    out: list = []
    for k, v, eps in items:
        w = comm(k, v)
        out.extend(w if eps > 0 else invert(w))
    return tuple(out)


def conj_items(kind: str, p: tuple, items) -> list:
    if not p:
        return list(items)
    if kind == "trace":
        return [(p + c, r, e) for c, r, e in items]
    pinv = invert(p)
    return [(p + k + pinv, p + v + pinv, e) for k, v, e in items]


def inverse_items(items) -> list:
    return [(a, b, -e) for a, b, e in reversed(items)]


class Lemma:
    """Certified replacement L -> M with L M^{-1} equal to the item product."""

    __slots__ = ("kind", "L", "M", "items")

    def __init__(self, kind: str, L, M, items, validate: bool | None = None):
        self.kind = kind
        self.L = tuple(L)
        self.M = tuple(M)
        self.items = list(items)
        if VALIDATE if validate is None else validate:
            self.validate()

    def value(self) -> tuple:
        return trace_value(self.items) if self.kind == "trace" else comm_value(self.items)

    def validate(self):
        lhs = free_reduce(self.L + invert(self.M))
        rhs = free_reduce(self.value())
        if lhs != rhs:
            raise RewriteError(
                f"lemma does not certify {render_word(self.L)} -> {render_word(self.M)}"
            )

    def swap(self) -> "Lemma":
        return Lemma(self.kind, self.M, self.L, inverse_items(self.items), validate=False)


class Session:
    """Rewrites a word while accumulating the certificate."""

    def __init__(self, word, kind: str = "trace"):
        self.kind = kind
        self.start = tuple(word)
        self.word = tuple(word)
        self.items: list = []

    def apply(self, lem: Lemma, pos: int) -> None:
        if lem.kind != self.kind:
            raise RewriteError("lemma kind mismatch")
        n = len(lem.L)
        if self.word[pos:pos + n] != lem.L:
            raise RewriteError(
                f"pattern {render_word(lem.L)} not found at position {pos} of {render_word(self.word)}"
            )
        self.items.extend(conj_items(self.kind, self.word[:pos], lem.items))
        self.word = self.word[:pos] + lem.M + self.word[pos + n:]

    def free(self, new_word) -> None:
        new_word = tuple(new_word)
        if free_reduce(self.word) != free_reduce(new_word):
            raise RewriteError("free rewrite changes the group element")
        self.word = new_word

    def reduce(self) -> None:
        self.word = free_reduce(self.word)

    def finish(self, validate: bool | None = None) -> Lemma:
        return Lemma(self.kind, self.start, self.word, self.items, validate)


# -- primitive proof-trace lemmas ------------------------------------------------

def _trace(L, M, items) -> Lemma:
    return Lemma("trace", L, M, items)


@lru_cache(maxsize=None)
def lem_T(i, j, k, a, b) -> Lemma:
    """x_ij^a x_jk^b (x_ij^a)^-1 -> x_ik^{ab} x_jk^b."""
    return _trace((x(i, j, a), x(j, k, b), xi(i, j, a)), (x(i, k, a * b), x(j, k, b)), [((), T(i, j, k, a, b), 1)])


@lru_cache(maxsize=None)
def lem_U(i, j, k, l, a, b) -> Lemma:
    """x_ij^a x_kl^b (x_ij^a)^-1 -> x_kl^b."""
    return _trace((x(i, j, a), x(k, l, b), xi(i, j, a)), (x(k, l, b),), [((), U(i, j, k, l, a, b), 1)])


@lru_cache(maxsize=None)
def lem_swap(i, j, k, l, a, b) -> Lemma:
    """x_ij^a x_kl^b -> x_kl^b x_ij^a for commuting roots."""
    return _trace((x(i, j, a), x(k, l, b)), (x(k, l, b), x(i, j, a)), [((), U(i, j, k, l, a, b), 1)])


@lru_cache(maxsize=None)
def lem_inv_to_neg(i, j, a) -> Lemma:
    """(x_ij^a)^-1 -> x_ij^{-a}."""
    zero = a.field.zero()
    return _trace((xi(i, j, a),), (x(i, j, -a),), [((), S(i, j, -a, a), -1), ((), S(i, j, zero, zero), -1)])


@lru_cache(maxsize=None)
def lem_merge(i, j, a, b) -> Lemma:
    """x_ij^a x_ij^b -> x_ij^{a+b}."""
    return _trace((x(i, j, a), x(i, j, b)), (x(i, j, a + b),), [((x(i, j, a + b),), S(i, j, a, b), 1)])


@lru_cache(maxsize=None)
def lem_drop(i, j, field) -> Lemma:
    """x_ij^0 -> e."""
    zero = field.zero()
    return _trace((x(i, j, zero),), (), [((), S(i, j, zero, zero), 1)])


def _commute(g: StGen, h: StGen) -> bool:
    return (g.i, g.j) == (h.i, h.j) or (g.j != h.i and g.i != h.j)


@lru_cache(maxsize=None)
def conj_letter(g: StGen, y: StGen) -> Lemma:
    """g y g^-1 -> word in positive letters, for positive letters g and y."""
    p, q, a = g
    r, s, b = y
    if _commute(g, y):
        return lem_U(p, q, r, s, a, b)
    if q == r and p != s:
        return lem_T(p, q, s, a, b)
    if p == s and q != r:
        sess = Session((x(p, q, a), x(r, p, b), xi(p, q, a)))
        ba = b * a
        sess.apply(_trace(sess.word, (xi(r, q, ba), x(r, p, b)), [((xi(r, q, ba),), T(r, p, q, b, a), -1)]), 0)
        sess.apply(lem_inv_to_neg(r, q, ba), 0)
        return sess.finish()
    raise RewriteError(f"no single-letter conjugation rule for {g} and {y}")


def collect(sess: Session) -> None:
    """Drop zero letters, merge equal roots, and commute letters together."""
    while True:
        w = sess.word
        if any(e < 0 for _, e in w):
            raise RewriteError("collector expects positive letters")
        done = True
        for idx, (g, _) in enumerate(w):
            if g.lam.is_zero():
                sess.apply(lem_drop(g.i, g.j, g.lam.field), idx)
                done = False
                break
        if not done:
            continue
        for idx in range(len(w) - 1):
            g, h = w[idx][0], w[idx + 1][0]
            if (g.i, g.j) == (h.i, h.j):
                sess.apply(lem_merge(g.i, g.j, g.lam, h.lam), idx)
                done = False
                break
        if not done:
            continue
        moved = False
        for i1 in range(len(w)):
            g = w[i1][0]
            for i2 in range(i1 + 2, len(w)):
                h = w[i2][0]
                if (h.i, h.j) != (g.i, g.j):
                    continue
                if all(_commute(g, w[t][0]) for t in range(i1 + 1, i2)):
                    for t in range(i1, i2 - 1):
                        cur, nxt = sess.word[t][0], sess.word[t + 1][0]
                        sess.apply(lem_swap(cur.i, cur.j, nxt.i, nxt.j, cur.lam, nxt.lam), t)
                    moved = True
                break
            if moved:
                break
        if not moved:
            return


def conj_word_by_letter(g: StGen, Y: tuple) -> Lemma:
    sess = Session(((g, 1),) + Y + ((g, -1),))
    sess.free(tuple(t for y in Y for t in ((g, 1), y, (g, -1))))
    pos = 0
    for y, e in Y:
        if e < 0:
            raise RewriteError("conjugated word must consist of positive letters")
        lem = conj_letter(g, y)
        sess.apply(lem, pos)
        pos += len(lem.M)
    collect(sess)
    return sess.finish()


def third_index(i: int, j: int) -> int:
    return next(k for k in (1, 2, 3) if k not in (i, j))


def w_word(i: int, j: int, u: CycNumber) -> tuple:
    """w_ij^u = x_ij^u x_ji^{-u^-1} x_ij^u."""
    _check_unit(u)
    return (x(i, j, u), x(j, i, -u.inverse()), x(i, j, u))


def h_word(i: int, j: int, u: CycNumber) -> tuple:
    """h_ij^u = w_ij^u w_ij^{-1}."""
    return w_word(i, j, u) + w_word(i, j, -u.field.one())


@lru_cache(maxsize=None)
def collapse(a: int, b: int, c: int, al: CycNumber, be: CycNumber) -> Lemma:
    """x_ab^al x_bc^be x_ab^-al x_bc^-be -> x_ac^{al be}."""
    sess = Session((x(a, b, al), x(b, c, be), x(a, b, -al), x(b, c, -be)))
    sess.apply(lem_inv_to_neg(a, b, al).swap(), 2)
    sess.apply(lem_T(a, b, c, al, be), 0)
    sess.apply(lem_merge(b, c, be, -be), 1)
    sess.apply(lem_drop(b, c, al.field), 1)
    return sess.finish()


@lru_cache(maxsize=None)
def conj_by_w(i: int, j: int, u: CycNumber, y: StGen) -> Lemma:
    """w_ij^u y (w_ij^u)^-1 -> single positive letter (free inverse of w)."""
    W = w_word(i, j, u)
    sess = Session(W + ((y, 1),) + invert(W))
    if {(y.i, y.j)} & {(i, j), (j, i)}:
        k = third_index(i, j)
        one = u.field.one()
        a, c = y.i, y.j
        sess.apply(collapse(a, k, c, y.lam, one).swap(), 3)
        D = sess.word[3:7]
        sess.free(tuple(t for d in D for t in W + (d,) + invert(W)))
        pos = 0
        for d, _ in D:
            lem = conj_by_w(i, j, u, d)
            sess.apply(lem, pos)
            pos += len(lem.M)
        r = [g for g, _ in sess.word]
        sess.apply(collapse(r[0].i, r[0].j, r[1].j, r[0].lam, r[1].lam), 0)
    else:
        g1, g2, g3 = (t[0] for t in W)
        sess.apply(conj_word_by_letter(g3, ((y, 1),)), 2)
        sess.apply(conj_word_by_letter(g2, sess.word[2:-2]), 1)
        sess.apply(conj_word_by_letter(g1, sess.word[1:-1]), 0)
    if len(sess.word) != 1:
        raise RewriteError(f"conjugation of {y} by w_{i}{j} did not collapse to one letter")
    return sess.finish()


def predicted_conjugate(i: int, j: int, u: CycNumber, y: StGen) -> StGen:
    """The six conjugation identities for w_ij^u acting on x^lam."""
    v = u.inverse()
    k = third_index(i, j)
    lam = y.lam
    root = (y.i, y.j)
    if root == (i, j):
        return StGen(j, i, -v * lam * v)
    if root == (j, i):
        return StGen(i, j, -u * lam * u)
    if root == (i, k):
        return StGen(j, k, -v * lam)
    if root == (k, i):
        return StGen(k, j, -u * lam)
    if root == (k, j):
        return StGen(k, i, v * lam)
    if root == (j, k):
        return StGen(i, k, u * lam)
    return y


def conj_word_by_w(i: int, j: int, u: CycNumber, Y: tuple) -> Lemma:
    W = w_word(i, j, u)
    sess = Session(W + Y + invert(W))
    sess.free(tuple(t for y in Y for t in W + (y,) + invert(W)))
    pos = 0
    for y, e in Y:
        if e < 0:
            raise RewriteError("conjugated word must consist of positive letters")
        lem = conj_by_w(i, j, u, y)
        sess.apply(lem, pos)
        pos += len(lem.M)
    return sess.finish()


def conj_word_by_ws(ws: Sequence, Y: tuple) -> Lemma:
    """(w_1 ... w_r) Y (w_1 ... w_r)^-1 with each w given as (i, j, u)."""
    words = [w_word(*p) for p in ws]
    H = tuple(t for w in words for t in w)
    sess = Session(H + Y + invert(H))
    for depth in range(len(ws) - 1, -1, -1):
        start = 3 * depth
        end = len(sess.word) - 3 * depth
        sess.apply(conj_word_by_w(*ws[depth], sess.word[start + 3:end - 3]), start)
    return sess.finish()


@lru_cache(maxsize=None)
def w_swap(i: int, j: int, a: CycNumber) -> Lemma:
    """w_ij^a -> w_ji^{-1/a}."""
    W = w_word(i, j, a)
    sess = Session(W)
    sess.free(W + W + invert(W))
    sess.apply(conj_word_by_w(i, j, a, W), 0)
    if sess.word != w_word(j, i, -a.inverse()):
        raise RewriteError("w swap produced an unexpected word")
    return sess.finish()


# -- the recorded proof ----------------------------------------------------------

@dataclass
class ProofTrace:
    target: tuple
    items: list

    def __len__(self):
        return len(self.items)

    def value(self) -> tuple:
        return trace_value(self.items)

    def validate(self) -> None:
        if free_reduce(self.value()) != free_reduce(self.target):
            raise RewriteError("proof trace does not reproduce its target")

    def relator_counts(self) -> dict:
        out: dict = {}
        for _, r, _ in self.items:
            out[r.kind] = out.get(r.kind, 0) + 1
        return out

    def dump(self, names: dict | None = None) -> list:
        return [
            {"conjugator": render_word(c, names), "relator": r.render(names), "sign": e}
            for c, r, e in self.items
        ]


def basic_words(kind: str, i: int, j: int, u: CycNumber) -> tuple:
    if kind == "w":
        return w_word(i, j, u)
    if kind == "h":
        return h_word(i, j, u)
    raise ValueError(f"unknown word kind {kind!r}")


def expand_h_commutator(u: CycNumber) -> ProofTrace:
    """Factor [h_13^{-u}, h_12^u] into conjugated S, T, U relators."""
    _check_unit(u)
    one = u.field.one()
    H13 = h_word(1, 3, -u)
    H12 = h_word(1, 2, u)
    target = comm(H13, H12)
    sess = Session(target)
    # conjugate h_12^u by h_13^{-u}
    sess.apply(conj_word_by_ws([(1, 3, -u), (1, 3, -one)], H12), 0)
    if sess.word[:6] != w_word(1, 2, -u * u) + w_word(1, 2, u):
        raise RewriteError("unexpected result of the h13 conjugation")
    # (w_12^{-1})^{-1} -> w_12^{1}
    for pos in (6, 7, 8):
        g = sess.word[pos][0]
        sess.apply(lem_inv_to_neg(g.i, g.j, g.lam), pos)
    # w_12^u w_12^1 (w_12^u)^-1 -> w_21^{-u^-2}
    sess.apply(conj_word_by_w(1, 2, u, sess.word[6:9]), 3)
    a = -(u.inverse() ** 2)
    if sess.word[3:6] != w_word(2, 1, a):
        raise RewriteError("unexpected result of the w12 conjugation")
    sess.apply(w_swap(2, 1, a), 3)
    # w_12^{u^2} -> (w_12^{-u^2})^-1, then cancel
    for pos in (3, 4, 5):
        g = sess.word[pos][0]
        sess.apply(lem_inv_to_neg(g.i, g.j, -g.lam).swap(), pos)
    sess.reduce()
    if sess.word:
        raise RewriteError("proof did not reduce to the empty word")
    tr = ProofTrace(target, sess.items)
    tr.validate()
    return tr


# -- index-4 substitution ------------------------------------------------------------

def sub_letter(letter) -> tuple:
    g, e = letter
    one = g.lam.field.one()
    c = (x(g.i, 4, one), x(4, g.j, g.lam), xi(g.i, 4, one), xi(4, g.j, g.lam))
    return c if e > 0 else invert(c)


def substitute(word) -> tuple:
    return tuple(t for letter in word for t in sub_letter(letter))


def c_word(i: int, j: int, lam: CycNumber) -> tuple:
    """[x_i4^1, x_4j^lam], the substitute of x_ij^lam."""
    return sub_letter(x(i, j, lam))


@dataclass
class SubstitutedTrace:
    target: tuple
    items: list   # (substituted conjugator, original relator, sign)

    def value(self) -> tuple:
        out: list = []
        for c, r, e in self.items:
            w = substitute(r.word())
            out.extend(c)
            out.extend(w if e > 0 else invert(w))
            out.extend(invert(c))
        return tuple(out)


def substitute_index4(trace: ProofTrace) -> SubstitutedTrace:
    st = SubstitutedTrace(substitute(trace.target), [(substitute(c), r, e) for c, r, e in trace.items])
    if VALIDATE and free_reduce(st.value()) != free_reduce(st.target):
        raise RewriteError("substitution broke the free identity")
    return st


# -- commutator rewriting ------------------------------------------------------------

def _comm_lemma(L, M, items) -> Lemma:
    return Lemma("comm", L, M, items)


class CommutatorRewriter:
    """Builds [K, v] factorisations; K relators are checked in ``group``."""

    def __init__(self, group: MatrixGroup):
        self.group = group
        self.ev = SteinbergEvaluator(group)
        self._cache: dict = {}

    # relator / value checks
    def _relator(self, K) -> None:
        if VALIDATE and not self.ev.is_relator(K):
            raise RewriteError(f"claimed relator does not evaluate to the identity: {render_word(K)}")

    def _is_elem(self, w, i, j, lam) -> None:
        if VALIDATE and self.ev.evaluate(w) != self.group.elementary(i, j, lam):
            raise RewriteError(f"word does not evaluate to e_{i}{j}")

    # primitive moves
    def gamma1(self, A, B, A2) -> Lemma:
        """[A, B] -> [A2, B] when A A2^-1 is a relator."""
        K = tuple(A) + invert(A2)
        items = []
        if free_reduce(K):
            self._relator(K)
            items = [(K, tuple(A2) + tuple(B) + invert(A2), 1)]
        return _comm_lemma(comm(A, B), comm(A2, B), items)

    def gamma2(self, A, B, B2) -> Lemma:
        """[A, B] -> [A, B2] when B B2^-1 is a relator."""
        K = tuple(B) + invert(B2)
        items = []
        if free_reduce(K):
            self._relator(K)
            A = tuple(A)
            items = [(A + K + invert(A), A + tuple(B2) + invert(A) + invert(B2) + invert(A), 1)]
        return _comm_lemma(comm(A, B), comm(A, B2), items)

    def central(self, K, Z) -> Lemma:
        """K Z -> Z K for a relator K."""
        self._relator(K)
        return _comm_lemma(tuple(K) + tuple(Z), tuple(Z) + tuple(K), [(tuple(K), tuple(Z), 1)])

    def kill_right(self, v, K) -> Lemma:
        """[v, K] -> e for a relator K."""
        self._relator(K)
        return _comm_lemma(comm(v, K), (), [(tuple(K), tuple(v), -1)])

    def lam(self, X, A, B, A2, B2) -> Lemma:
        """X [A, B] X^-1 -> [A2, B2] when the conjugated arguments match A2, B2."""
        sess = Session(conj(X, comm(A, B)), "comm")
        XA, XB = conj(X, A), conj(X, B)
        sess.free(comm(XA, XB))
        sess.apply(self.gamma1(XA, XB, A2), 0)
        sess.apply(self.gamma2(A2, XB, B2), 0)
        return sess.finish()

    def ucomm(self, A, B, ra: tuple, rb: tuple) -> Lemma:
        """[A, B] -> e when phi(A) = e_pq^al and phi(B) = e_rs^be commute."""
        p, q, al = ra
        r, s, be = rb
        if not (q != r and p != s):
            raise RewriteError("ucomm needs commuting elementary images")
        self._is_elem(A, p, q, al)
        self._is_elem(B, r, s, be)
        h = next(t for t in range(1, self.group.dim + 1) if t not in (p, q, r, s))
        one = al.field.one()
        a1 = (x(p, q, al),)
        b1 = (x(r, h, one),)
        b2 = (x(h, s, be),)
        bc = comm(b1, b2)
        sess = Session(comm(A, B), "comm")
        sess.apply(self.gamma1(A, B, a1), 0)
        sess.apply(self.gamma2(a1, B, bc), 0)
        sess.apply(self.lam(a1, b1, b2, b1, b2), 0)
        sess.reduce()
        if sess.word:
            raise RewriteError("ucomm did not cancel")
        return sess.finish()

    # relator rewritings after substitution
    def rewrite(self, r: Rel) -> Lemma:
        lem = self._cache.get(r)
        if lem is None:
            lem = getattr(self, "_rewrite_" + r.kind)(r)
            if lem.L != substitute(r.word()) or lem.M:
                raise RewriteError("rewriting does not match the substituted relator")
            self._cache[r] = lem
        return lem

    def _rewrite_U(self, r: Rel) -> Lemma:
        i, j, k, l = r.idx
        lam, mu = r.a, r.b
        one = lam.field.one()
        cij, ckl = c_word(i, j, lam), c_word(k, l, mu)
        xij = (x(i, j, lam),)
        a, b = (x(k, 4, one),), (x(4, l, mu),)
        sess = Session(comm(cij, ckl), "comm")
        sess.apply(self.gamma1(cij, ckl, xij), 0)
        sess.free(conj(xij, ckl) + invert(ckl))
        sess.apply(self.lam(xij, a, b, a, b), 0)
        sess.reduce()
        return sess.finish()

    def _rewrite_S(self, r: Rel) -> Lemma:
        i, j = r.idx
        a, b = r.a, r.b
        one = a.field.one()
        p = (x(i, 4, one),)
        qa, qb, qab = (x(4, j, a),), (x(4, j, b),), (x(4, j, a + b),)
        Y = comm(p, qb)
        sess = Session(invert(comm(p, qab)) + comm(p, qa) + Y, "comm")
        part1 = invert(comm(p, qab))
        part2 = comm(p, qa + qb)
        part3 = comm(qa, invert(Y))
        sess.free(part1 + part2 + part3)
        sess.apply(self.ucomm(qa, invert(Y), (4, j, a), (i, j, -b)), len(part1) + len(part2))
        sess.apply(self.gamma2(p, qa + qb, qab), len(part1))
        sess.reduce()
        return sess.finish()

    def _rewrite_T(self, r: Rel) -> Lemma:
        i, j, k = r.idx
        a, b = r.a, r.b
        one = a.field.one()
        p = (x(i, 4, one),)
        q = (x(4, j, a),)
        rr = c_word(j, k, b)
        c = c_word(i, k, a * b)
        t5 = comm(p, q)
        t2 = comm(q, rr)
        t3 = comm(p, rr)
        t1 = comm(p, t2)
        K7 = comm(rr, p)
        t7 = comm(q, K7)
        sess = Session(substitute(r.word()), "comm")
        seq = [t5, invert(t2), t7, invert(t3), invert(t5), t1, t2, t3, invert(c)]
        sess.free(tuple(t for s in seq for t in s))
        # [q, [r, p]] -> e
        pos = len(t5) + len(t2)
        sess.apply(self.kill_right(q, K7), pos)
        # move the relator [p, r]^-1 to the right and cancel it
        Z = invert(t5) + t1 + t2
        sess.apply(self.central(invert(t3), Z), pos)
        sess.free(t5 + invert(t2) + invert(t5) + t1 + t2 + invert(c))
        # [p, [q, r]] -> [p, x_4k^{ab}]
        pos = len(t5) + len(t2) + len(t5)
        sess.apply(self.gamma2(p, t2, (x(4, k, a * b),)), pos)
        # t5 t2^-1 t5^-1 c t2 c^-1 = [t5, t2^-1] [t2^-1, c]
        u1 = comm(t5, invert(t2))
        u2 = comm(invert(t2), c)
        sess.free(u1 + u2)
        sess.apply(self.ucomm(t5, invert(t2), (i, j, a), (4, k, -(a * b))), 0)
        sess.apply(self.ucomm(invert(t2), c, (4, k, -(a * b)), (i, k, a * b)), 0)
        sess.reduce()
        return sess.finish()


@dataclass
class CommutatorRHS:
    target: tuple
    factors: list      # (K, v, sign), Steinberg-letter words
    counts: dict

    def __len__(self):
        return len(self.factors)

    def value(self) -> tuple:
        return comm_value(self.factors)

    def validate(self) -> None:
        if free_reduce(self.value()) != free_reduce(self.target):
            raise RewriteError("assembled commutators do not reproduce [w_B, w_A]")


def assemble_rhs(u: CycNumber, group: MatrixGroup, trace: ProofTrace | None = None) -> CommutatorRHS:
    """[w_B, w_A] as a product of commutators [K, v]^{+-1} with K relators."""
    if trace is None:
        trace = expand_h_commutator(u)
    st = substitute_index4(trace)
    rw = CommutatorRewriter(group)
    factors: list = []
    counts = {"S": 0, "T": 0, "U": 0}
    per_kind: dict = {}
    for cbar, r, e in st.items:
        lem = rw.rewrite(r)
        items = lem.items if e > 0 else inverse_items(lem.items)
        factors.extend(conj_items("comm", cbar, items))
        counts[r.kind] += 1
        per_kind[r.kind] = len(lem.items)
    rhs = CommutatorRHS(st.target, factors, {"relators": counts, "commutators_per_kind": per_kind})
    if VALIDATE:
        rhs.validate()
    return rhs


def w_A_word(u: CycNumber) -> tuple:
    return substitute(h_word(1, 2, u))


def w_B_word(u: CycNumber) -> tuple:
    return substitute(h_word(1, 3, -u))


# -- public wrappers ---------------------------------------------------------------

CASES = ("jk", "kj", "ki", "ik", "ji", "ij")


def conj_rewrite(case: str, i: int, j: int, k: int, u: CycNumber, lam: CycNumber):
    """w_ij^u x^lam (w_ij^u)^-1 for the root named by ``case``; returns (result, trace)."""
    if case not in CASES:
        raise RewriteError(f"unknown case {case!r}")
    if len({i, j, k}) != 3 or {i, j, k} != {1, 2, 3}:
        raise RewriteError("indices must be a permutation of 1, 2, 3")
    _check_unit(u)
    names = {"i": i, "j": j, "k": k}
    y = StGen(names[case[0]], names[case[1]], lam)
    lem = conj_by_w(i, j, u, y)
    res = lem.M[0][0]
    W = w_word(i, j, u)
    target = W + ((y, 1),) + invert(W) + ((res, -1),)
    tr = ProofTrace(target, lem.items)
    tr.validate()
    return res, tr


def relator_to_commutators(r: Rel, group: MatrixGroup) -> list:
    """Substituted relator as a list of (K, v, sign) with [K, v]^sign."""
    return list(CommutatorRewriter(group).rewrite(r).items)


def check_relators(trace: ProofTrace, group: MatrixGroup) -> bool:
    ev = SteinbergEvaluator(group)
    return all(ev.is_relator(r.word()) for r in {it[1] for it in trace.items})


def diag_A(u: CycNumber, dim: int = 5):
    F = u.field
    return [u, u.inverse()] + [F.one()] * (dim - 2)


def diag_B(u: CycNumber, dim: int = 5):
    F = u.field
    return [-u, F.one(), -u.inverse()] + [F.one()] * (dim - 3)


@dataclass
class LHSDecomposition:
    A: int
    B: int
    w_A: tuple     # signed-id words
    w_B: tuple
    K_A: tuple
    K_B: tuple
    v_A: tuple
    v_B: tuple
    product: "object"   # CommutatorProduct


def commutator_factors(K, v, sign: int, group: MatrixGroup, conj_word=()) -> list:
    """CommutatorProduct factors of [K, v]^sign (signed-id words, K a relator)."""
    from .foxbar import triple_split
    from .words import reduce_ids
    split = triple_split(reduce_ids(K), group)
    c = tuple(conj_word)
    cv = c + tuple(v)
    fwd = [(c, a, b, n) for a, b, n in split]
    back = [(cv, a, b, -n) for a, b, n in reversed(split)]
    if sign > 0:
        return fwd + back
    return [(cv, a, b, n) for a, b, n in split] + [(c, a, b, -n) for a, b, n in reversed(split)]


def lhs_decomposition(u: CycNumber, group: MatrixGroup) -> LHSDecomposition:
    from .foxbar import CommutatorProduct
    from .matrices import ExactMatrix
    from .words import comm_ids, reduce_ids
    _check_unit(u)
    ev = SteinbergEvaluator(group)
    A = group.intern(ExactMatrix.diagonal(u.field, diag_A(u, group.dim)))
    B = group.intern(ExactMatrix.diagonal(u.field, diag_B(u, group.dim)))
    w_A = ev.to_ids(w_A_word(u))
    w_B = ev.to_ids(w_B_word(u))
    if group.evaluate(w_A) != A or group.evaluate(w_B) != B:
        raise RewriteError("w_A or w_B does not evaluate to the expected diagonal matrix")
    K_A = w_A + (-A,)
    K_B = w_B + (-B,)
    v_A = (A, B, -A)
    v_B = (B,) + w_A + (-B,)
    cp = CommutatorProduct()
    cp.factors.extend(commutator_factors(K_B, v_B, 1, group))
    cp.append((), B, A, 1)
    cp.append((), A, B, -1)
    cp.factors.extend(commutator_factors(K_A, v_A, -1, group))
    if reduce_ids(cp.expand(group)) != reduce_ids(comm_ids(w_B, w_A)):
        raise RewriteError("left-hand decomposition is not a free identity")
    return LHSDecomposition(A, B, w_A, w_B, K_A, K_B, v_A, v_B, cp)
