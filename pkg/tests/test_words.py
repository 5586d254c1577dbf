import pytest
from hypothesis import given, strategies as st

from borel_cycles.cyclo import make_field
from borel_cycles.matrices import MatrixGroup
from borel_cycles.words import (
    MatrixAlphabet, SteinbergEvaluator, Word, WordError, comm, comm_ids, free_reduce, invert, invert_ids,
    reduce_ids, render_word, st as gen,
)

F = make_field(3)
ids = st.lists(st.integers(-4, 4).filter(bool), max_size=30)


@given(ids)
def test_reduction_is_idempotent_and_cancels_inverse(w):
    r = reduce_ids(w)
    assert reduce_ids(r) == r
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert reduce_ids(tuple(w) + invert_ids(w)) == ()


@given(ids, ids)
def test_commutator_of_reduced_words(a, b):
    c = reduce_ids(comm_ids(a, b))
    assert reduce_ids(comm_ids(b, a)) == reduce_ids(invert_ids(c))


def test_steinberg_letter_reduction():
    z = F.zeta(1)
    x = gen(1, 2, z)
    w = (x, gen(2, 3, F.one()), *invert((gen(2, 3, F.one()),)), (x[0], -1))
    assert free_reduce(w) == ()


def test_steinberg_relations_hold_in_matrices():
    g = MatrixGroup(F, 4)
    ev = SteinbergEvaluator(g)
    z, one = F.zeta(1), F.one()
    a, b = (gen(1, 2, z),), (gen(1, 2, one + z),)
    ab = (gen(1, 2, one + z + z),)
    assert ev.is_relator(a + b + invert(ab))                        # x^a x^b = x^(a+b)
    c = comm((gen(1, 2, z),), (gen(2, 3, one),))
    assert ev.is_relator(c + invert((gen(1, 3, z),)))               # [x12^a, x23^b] = x13^ab
    assert ev.is_relator(comm((gen(1, 2, z),), (gen(3, 4, z),)))    # disjoint indices commute
    assert not ev.is_relator(comm((gen(1, 2, z),), (gen(2, 1, z),)))


def test_word_class():
    g = MatrixGroup(F, 3)
    a = g.elementary(1, 2, F.zeta(1))
    b = g.elementary(2, 3, F.one())
    alpha = MatrixAlphabet(g)
    wa, wb = Word(alpha, (a,)), Word(alpha, (b,))
    c = wa.commutator(wb)
    assert not c.is_relator()
    assert (c * c.inverse()).reduce() == Word(alpha, ())
    assert wa.conjugate(wb).freely_equal(Word(alpha, (b, a, -b)))


def test_rendering_and_errors():
    with pytest.raises(WordError):
        gen(1, 1, F.one())
    assert "x_{12}" in render_word((gen(1, 2, F.one()),))
