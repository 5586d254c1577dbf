"""Bar/standard chains in coinvariants, the Fox derivative, the linearisation W
and the splitting of relators into elementary triples.

Tuples hold MatrixGroup ids, so every function takes the group explicitly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .matrices import MatrixGroup
from .words import invert_ids, reduce_ids

log = logging.getLogger(__name__)


class NotARelatorError(ValueError):
    pass


class Chain:
    """Formal Z-linear combination of tuples of group ids.

    ``kind`` is "bar" for [g1|...|gk] or "std" for (g0,...,gk).
    """

    __slots__ = ("kind", "terms")

    def __init__(self, kind: str = "bar", terms: dict | None = None):
        self.kind = kind
        self.terms: dict = {}
        if terms:
            for t, c in terms.items():
                if c:
                    self.terms[tuple(t)] = c

    def copy(self) -> "Chain":
        ch = Chain(self.kind)
        ch.terms = dict(self.terms)
        return ch

    def add_term(self, t: tuple, c: int) -> None:
        if not c:
            return
        terms = self.terms
        v = terms.get(t, 0) + c
        if v:
            terms[t] = v
        else:
            del terms[t]

    def iadd(self, other: "Chain", scale: int = 1) -> "Chain":
        self._check(other)
        for t, c in other.terms.items():
            self.add_term(t, c * scale)
        return self

    def _check(self, other: "Chain"):
        if other.kind != self.kind:
            raise ValueError(f"cannot combine {self.kind} and {other.kind} chains")

    def __add__(self, other: "Chain") -> "Chain":
        return self.copy().iadd(other)

    def __sub__(self, other: "Chain") -> "Chain":
        return self.copy().iadd(other, -1)

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def scale(self, k: int) -> "Chain":
        ch = Chain(self.kind)
        if k:
            ch.terms = {t: c * k for t, c in self.terms.items()}
        return ch

    __rmul__ = lambda self, k: self.scale(k)

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.kind == other.kind and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def arities(self) -> set:
        return {len(t) for t in self.terms}

    def matrix_ids(self) -> set:
        return {g for t in self.terms for g in t}

    def sorted_items(self, group: MatrixGroup | None = None) -> list:
        """Deterministic ordering, by matrix keys when a group is given."""
        if group is None:
            return sorted(self.terms.items())
        return sorted(self.terms.items(), key=lambda tc: tuple(group[g].key for g in tc[0]))

    def __repr__(self):
        return f"Chain({self.kind}, {len(self.terms)} terms)"


def bar_d(chain: Chain, group: MatrixGroup) -> Chain:
    """Differential of the bar complex in coinvariants."""
    if chain.kind != "bar":
        raise ValueError("bar_d expects a bar chain")
    out = Chain("bar")
    mul = group.mul
    add = out.add_term
    for t, c in chain.terms.items():
        n = len(t)
        if n == 0:
            continue
        add(t[1:], c)
        for i in range(n - 1):
            sgn = -c if i % 2 == 0 else c
            add(t[:i] + (mul(t[i], t[i + 1]),) + t[i + 2:], sgn)
        add(t[:-1], c if n % 2 == 0 else -c)
    return out


def std_d(chain: Chain) -> Chain:
    if chain.kind != "std":
        raise ValueError("std_d expects a standard chain")
    out = Chain("std")
    for t, c in chain.terms.items():
        for i in range(len(t)):
            out.add_term(t[:i] + t[i + 1:], c if i % 2 == 0 else -c)
    return out


def psi(chain: Chain, group: MatrixGroup) -> Chain:
    """[x1|...|xn] -> (1, x1, x1x2, ..., x1...xn)."""
    if chain.kind != "bar":
        raise ValueError("psi expects a bar chain")
    out = Chain("std")
    for t, c in chain.terms.items():
        acc = group.e
        tup = [acc]
        for x in t:
            acc = group.mul(acc, x)
            tup.append(acc)
        out.add_term(tuple(tup), c)
    return out


def phi(chain: Chain, group: MatrixGroup) -> Chain:
    """(y0,...,yn) -> [y0^-1 y1 | y1^-1 y2 | ... | y_{n-1}^-1 y_n]."""
    if chain.kind != "std":
        raise ValueError("phi expects a standard chain")
    out = Chain("bar")
    for t, c in chain.terms.items():
        out.add_term(tuple(group.mul(group.inv(t[i - 1]), t[i]) for i in range(1, len(t))), c)
    return out


def steinberg_symbol(a: int, b: int) -> Chain:
    """{a, b} = [a|b] - [b|a]."""
    ch = Chain("bar")
    ch.add_term((a, b), 1)
    ch.add_term((b, a), -1)
    return ch


def fox_derivative(word: Sequence[int], group: MatrixGroup) -> Chain:
    """Sum of eps_i [x_1^{eps_1}...x_{i-1}^{eps_{i-1}} z_i | x_i]."""
    out = Chain("bar")
    p = group.e
    for x in word:
        if x > 0:
            out.add_term((p, x), 1)
            p = group.mul(p, x)
        else:
            g = -x
            p = group.mul(p, group.inv(g))
            out.add_term((p, g), -1)
    return out


@dataclass
class CommutatorProduct:
    """prod_i u_i (s_{x_i} s_{y_i} s_{x_i y_i}^{-1})^{n_i} u_i^{-1}.

    Each factor is ``(u, x, y, n)`` with u a signed-id word.
    """

    factors: list = field(default_factory=list)

    def append(self, u: Sequence[int], x: int, y: int, n: int = 1) -> None:
        self.factors.append((tuple(u), x, y, n))

    def extend(self, other: "CommutatorProduct") -> None:
        self.factors.extend(other.factors)

    def __len__(self):
        return len(self.factors)

    def expand(self, group: MatrixGroup) -> tuple:
        out: list = []
        for u, x, y, n in self.factors:
            if not n:
                continue
            tri = (x, y, -group.mul(x, y))
            block = tri * n if n > 0 else invert_ids(tri) * (-n)
            out.extend(u)
            out.extend(block)
            out.extend(invert_ids(u))
        return tuple(out)

    def pair_sum(self) -> Chain:
        """Sum n_i [x_i | y_i]."""
        ch = Chain("bar")
        for _, x, y, n in self.factors:
            ch.add_term((x, y), n)
        return ch


def linearise_W(cp: CommutatorProduct, group: MatrixGroup) -> Chain:
    out = Chain("bar")
    cache: dict = {}
    for u, x, y, n in cp.factors:
        if not n:
            continue
        g = cache.get(u)
        if g is None:
            g = group.evaluate(u)
            cache[u] = g
        out.add_term((g, x, y), n)
    return out


def linearisation_residual(cp: CommutatorProduct, group: MatrixGroup) -> Chain:
    """d(W(cp)) - sum n_i[x_i|y_i] + fox(expand(cp)); zero when the identity holds."""
    res = bar_d(linearise_W(cp, group), group)
    res.iadd(cp.pair_sum(), -1)
    res.iadd(fox_derivative(cp.expand(group), group))
    return res


def triple_split(word: Sequence[int], group: MatrixGroup, check: bool = True) -> list:
    """Split a relator into elementary triples (x, y, +-1) with empty conjugators.

    The product of (s_x s_y s_{xy}^{-1})^{+-1} over the returned list freely
    reduces to ``word``.
    """
    if not word:
        return []
    if check and group.evaluate(word) != group.e:
        raise NotARelatorError("word does not evaluate to the identity")
    e = group.e
    mul, inv = group.mul, group.inv
    out = []
    first = word[0]
    if first > 0:
        run = first
    else:
        log.warning("relator begins with an inverse letter; using the prefix rule")
        a = -first
        ai = inv(a)
        out.append((e, e, -1))
        out.append((ai, a, -1))
        run = ai
    for x in word[1:]:
        if x > 0:
            out.append((run, x, 1))
            run = mul(run, x)
        else:
            b = -x
            run = mul(run, inv(b))
            out.append((run, b, -1))
    out.append((e, e, 1))
    return out


def split_to_product(word: Sequence[int], group: MatrixGroup, conj: Sequence[int] = ()) -> CommutatorProduct:
    cp = CommutatorProduct()
    for x, y, n in triple_split(word, group):
        cp.append(conj, x, y, n)
    return cp


def freely_equal(a: Iterable[int], b: Iterable[int]) -> bool:
    return reduce_ids(a) == reduce_ids(b)
