"""Free-group words over a matrix alphabet or over Steinberg generators.

Two letter encodings are used:

* matrix alphabet: a signed int, +k for s_g and -k for s_g^{-1}, where k is
  the id of g in a :class:`MatrixGroup`;
* Steinberg alphabet: a pair ``(StGen, +1 | -1)``.

The plain-tuple functions below are what the pipeline uses internally; the
:class:`Word` class wraps them with an alphabet for the public API.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .cyclo import CycField, CycNumber, format_element
from .matrices import ExactMatrix, MatrixGroup


class WordError(ValueError):
    pass


class AlphabetError(WordError):
    pass


class EvaluationError(WordError):
    pass


class StGen(NamedTuple):
    """Steinberg generator x_{ij}^lam."""

    i: int
    j: int
    lam: CycNumber


def st(i: int, j: int, lam, exp: int = 1, field: CycField | None = None):
    if i == j:
        raise WordError(f"Steinberg generator needs i != j, got {i}")
    if not isinstance(lam, CycNumber):
        if field is None:
            raise WordError("field required for a rational parameter")
        lam = field(lam)
    return (StGen(i, j, lam), exp)


# -- plain tuple operations (Steinberg letters) ---------------------------

def inv_letter(x):
    return (x[0], -x[1])


def invert(w: Sequence) -> tuple:
    return tuple((s, -e) for s, e in reversed(w))


def free_reduce(w: Iterable) -> tuple:
    out: list = []
    for s, e in w:
        if out and out[-1][1] == -e and out[-1][0] == s:
            out.pop()
        else:
            out.append((s, e))
    return tuple(out)


def conj(c: Sequence, w: Sequence) -> tuple:
    return tuple(c) + tuple(w) + invert(c)


def comm(a: Sequence, b: Sequence) -> tuple:
    return tuple(a) + tuple(b) + invert(a) + invert(b)


# -- plain tuple operations (signed-int letters) ---------------------------

def invert_ids(w: Sequence[int]) -> tuple:
    return tuple(-x for x in reversed(w))


def reduce_ids(w: Iterable[int]) -> tuple:
    out: list = []
    push, pop = out.append, out.pop
    for x in w:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return tuple(out)


def comm_ids(a: Sequence[int], b: Sequence[int]) -> tuple:
    return tuple(a) + tuple(b) + invert_ids(a) + invert_ids(b)


def conj_ids(c: Sequence[int], w: Sequence[int]) -> tuple:
    return tuple(c) + tuple(w) + invert_ids(c)


# -- evaluation ------------------------------------------------------------

class SteinbergEvaluator:
    """Maps Steinberg words into a MatrixGroup through x_{ij}^lam -> e_{ij}^lam."""

    def __init__(self, group: MatrixGroup):
        self.group = group
        self._cache: dict = {}

    def gen_id(self, g: StGen) -> int:
        gid = self._cache.get(g)
        if gid is None:
            if not (1 <= g.i <= self.group.dim and 1 <= g.j <= self.group.dim):
                raise EvaluationError(f"index of {render_gen(g)} exceeds dimension {self.group.dim}")
            gid = self.group.elementary(g.i, g.j, g.lam)
            self._cache[g] = gid
        return gid

    def to_ids(self, w: Sequence) -> tuple:
        """Image of a Steinberg word as a matrix-alphabet word."""
        gid = self.gen_id
        return tuple(gid(s) if e > 0 else -gid(s) for s, e in w)

    def evaluate(self, w: Sequence) -> int:
        return self.group.evaluate(self.to_ids(w))

    def is_relator(self, w: Sequence) -> bool:
        return self.evaluate(w) == self.group.e


# -- rendering -------------------------------------------------------------

def render_scalar(lam: CycNumber, names: dict | None = None) -> str:
    if names and lam in names:
        return names[lam]
    if names:
        neg = -lam
        if neg in names:
            return "-" + names[neg]
    return format_element(lam)


def render_gen(g: StGen, names: dict | None = None) -> str:
    return f"x_{{{g.i}{g.j}}}^{{{render_scalar(g.lam, names)}}}"


def render_word(w: Sequence, names: dict | None = None) -> str:
    parts = []
    for s, e in w:
        t = render_gen(s, names)
        parts.append(t if e > 0 else f"({t})^{{-1}}")
    return " ".join(parts) if parts else "e"


def unit_names(u: CycNumber) -> dict:
    """Readable names for the usual unit expressions in u."""
    v = u.inverse()
    out = {}
    for expr, name in [
        (u.field.one(), "1"), (u, "u"), (v, "u^{-1}"), (u * u, "u^2"), (v * v, "u^{-2}"),
    ]:
        out.setdefault(expr, name)
    return out


# -- public Word type --------------------------------------------------------

class MatrixAlphabet:
    kind = "matrix"

    def __init__(self, group: MatrixGroup):
        self.group = group

    def evaluate(self, letters) -> ExactMatrix:
        return self.group[self.group.evaluate(letters)]


class SteinbergAlphabet:
    kind = "steinberg"

    def __init__(self, group: MatrixGroup):
        self.group = group
        self.ev = SteinbergEvaluator(group)

    def evaluate(self, letters) -> ExactMatrix:
        return self.group[self.ev.evaluate(letters)]


class Word:
    """A word in a named alphabet; letters follow the module's encodings."""

    __slots__ = ("alphabet", "letters", "reduced")

    def __init__(self, alphabet, letters=(), reduced: bool = False):
        self.alphabet = alphabet
        self.letters = tuple(letters)
        self.reduced = reduced

    @property
    def _int(self):
        return self.alphabet.kind == "matrix"

    def _same(self, other: "Word"):
        if other.alphabet is not self.alphabet:
            raise AlphabetError("words belong to different alphabets")

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and other.alphabet is self.alphabet and other.letters == self.letters

    def __hash__(self):
        return hash(self.letters)

    def reduce(self) -> "Word":
        if self.reduced:
            return self
        red = reduce_ids(self.letters) if self._int else free_reduce(self.letters)
        return Word(self.alphabet, red, True)

    def inverse(self) -> "Word":
        inv = invert_ids(self.letters) if self._int else invert(self.letters)
        return Word(self.alphabet, inv, self.reduced)

    def __mul__(self, other: "Word") -> "Word":
        self._same(other)
        return Word(self.alphabet, self.letters + other.letters)

    def conjugate(self, u: "Word") -> "Word":
        """u * self * u^{-1}."""
        self._same(u)
        return u * self * u.inverse()

    def commutator(self, other: "Word") -> "Word":
        self._same(other)
        return self * other * self.inverse() * other.inverse()

    def evaluate(self) -> ExactMatrix:
        return self.alphabet.evaluate(self.letters)

    def is_relator(self) -> bool:
        return self.evaluate().is_identity()

    def freely_equal(self, other: "Word") -> bool:
        self._same(other)
        return self.reduce().letters == other.reduce().letters

    def __repr__(self):
        if self._int:
            return "Word(" + " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in self.letters) + ")"
        return "Word(" + render_word(self.letters) + ")"


def commutator(a: Word, b: Word) -> Word:
    return a.commutator(b)


def conjugate(w: Word, u: Word) -> Word:
    return w.conjugate(u)
