import json
import math

import numpy as np
import pytest

from borel_cycles.cycles import torsion_cycle
from borel_cycles.foxbar import Chain
from borel_cycles.matrices import ExactMatrix, MatrixGroup
from borel_cycles.regulator import (
    APPENDIX_VALUE, CONE_SIGNS, CheckpointError, ConvergenceRiskError, Interrupted, NotACycleError, RegTuple,
    SeriesResult, ShapeError, appendix_tuple_exact, appendix_value_exact, chunk_size, cone_decompose, evaluate,
    evaluate_tuples, hamida, hamida_batch, hamida_naive, preprocess, tail_estimate, tuple_scale,
)


def random_cone(rng, n=3, scale=0.4):
    return [np.eye(n) + scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / n for _ in range(3)]


@pytest.mark.parametrize("seed", range(4))
def test_batched_series_matches_naive_loop(seed):
    rng = np.random.default_rng(seed)
    Y = random_cone(rng)
    for ms, me in ((1, 1), (1, 3), (2, 4)):
        fast = hamida(*Y, ms, me)
        slow = hamida_naive(*Y, ms, me)
        assert abs(fast - slow) <= 1e-12 * max(1.0, abs(slow))


def test_batch_axis_and_shape_errors():
    rng = np.random.default_rng(5)
    cones = [random_cone(rng) for _ in range(3)]
    batch = hamida_batch(*(np.array([c[k] for c in cones]) for k in range(3)), 1, 3)
    for i, c in enumerate(cones):
        assert np.allclose(batch[i], hamida_batch(*c, 1, 3)[0], rtol=0, atol=1e-14)
    with pytest.raises(ShapeError):
        hamida_batch(np.eye(3), np.eye(2), np.eye(3), 1, 2)
    with pytest.raises(ValueError):
        hamida(*cones[0], 0, 2)


def test_appendix_value():
    ch, g = appendix_tuple_exact()
    res = evaluate(ch, g, 2)
    assert abs(res.value - 1j * float(appendix_value_exact())) < 1e-12
    assert abs(APPENDIX_VALUE.imag - float(appendix_value_exact())) < 1e-16


def test_identical_matrices_give_zero():
    I = np.eye(3, dtype=complex)
    assert hamida(I, I, I, 1, 4) == 0


def test_rational_cycle_is_killed(F3):
    # u = -1 gives a cycle of real matrices; its regulator vanishes
    ch, g = torsion_cycle(-F3.one(), 2)
    res = evaluate(ch, g, 5)
    assert abs(res.value) <= 1e-14 and math.isfinite(res.tail_estimate)


def test_preprocess_drops_and_merges(F3):
    g = MatrixGroup(F3, 2)
    z = F3.zeta(1)
    m = [g.intern(ExactMatrix.diagonal(F3, [z ** k, F3.one()])) for k in range(3)]
    m.append(g.elementary(1, 2, z))
    a, b, c, d = m
    ch = Chain("std")
    ch.add_term((a, b, c, d), 2)
    ch.add_term((b, a, c, d), 1)       # odd permutation: merges with sign -1
    ch.add_term((a, a, c, d), 5)       # repeated matrix: dropped
    ch.add_term((d, c, b, a), 1)       # even permutation
    tuples = preprocess(ch, g)
    ref = Chain("std")
    ref.add_term((a, b, c, d), 2)
    (expected,) = preprocess(ref, g)
    assert len(tuples) == 1 and tuples[0].coef == expected.coef and tuples[0].ids == expected.ids


def test_scaling_and_cones():
    rng = np.random.default_rng(2)
    mats = tuple(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(4))
    lam = tuple_scale(mats)
    t = RegTuple(1, mats)
    cones = cone_decompose(t, lam)
    assert [c.sign for c in cones] == list(CONE_SIGNS)
    for c in cones:
        for y in c.Y:
            assert np.linalg.eigvalsh(y @ y.conj().T).max() <= 1.0 / lam + 1e-12
    with pytest.raises(ConvergenceRiskError):
        cone_decompose(t, lam / 2)


def test_tail_estimate():
    geo = [0.5 ** k for k in range(1, 8)]
    assert tail_estimate(geo) == pytest.approx(geo[-1], rel=1e-12)
    assert tail_estimate([1, 2, 3, 4]) == math.inf
    assert tail_estimate([1, 0.5, 0]) == 0.0
    with pytest.raises(ValueError):
        tail_estimate([1, 2])


def test_not_a_cycle(F3):
    ch, g = torsion_cycle(F3.zeta(1), 3)
    t = next(iter(ch.terms))
    ch.add_term(t, 1)
    with pytest.raises(NotACycleError):
        evaluate(ch, g, 3)
    evaluate(ch, g, 3, skip_verify=True)


def test_chunking_does_not_change_results():
    rng = np.random.default_rng(9)
    tuples = [RegTuple(int(rng.integers(-2, 3)) or 1, tuple(random_cone(rng, 3, 1.0)) + (np.eye(3),))
              for _ in range(7)]
    a = evaluate_tuples(tuples, 3, chunk=2)
    b = evaluate_tuples(tuples, 3, chunk=2, workers=3)
    assert a.value == b.value and a.partials == b.partials
    assert chunk_size(9) >= 1 and chunk_size(4) >= chunk_size(6)


def test_result_json_round_trip():
    r = SeriesResult(complex(1e-17, -0.1234567890123456789), [0.1 + 0.2j, -0.3j, 1e-300j], 3, 0.5)
    back = SeriesResult.from_json(json.loads(json.dumps(r.to_json())))
    assert back.value == r.value and back.partials == r.partials


def test_checkpoint_resume_and_corruption(tmp_path):
    rng = np.random.default_rng(4)
    tuples = [RegTuple(1, tuple(random_cone(rng, 3, 1.0)) + (np.eye(3),)) for _ in range(6)]
    full = evaluate_tuples(tuples, 3, chunk=1)
    with pytest.raises(Interrupted):
        evaluate_tuples(tuples, 3, chunk=1, checkpoint_dir=tmp_path, stop_after=2)
    resumed = evaluate_tuples(tuples, 3, chunk=1, checkpoint_dir=tmp_path)
    assert resumed.value == full.value and resumed.partials == full.partials

    (ck,) = tmp_path.glob("*.ckpt")
    lines = ck.read_text().splitlines()
    rec = json.loads(lines[1])
    rec["rows"][0][0][1] = (1.0).hex()
    ck.write_text("\n".join([lines[0], json.dumps(rec)] + lines[2:]) + "\n")
    with pytest.raises(CheckpointError):
        evaluate_tuples(tuples, 3, chunk=1, checkpoint_dir=tmp_path)
    # a different configuration must not silently reuse the file
    head = json.loads(lines[0])
    head["header"]["precision"] = 53
    ck.write_text(json.dumps(head) + "\n")
    with pytest.raises(CheckpointError):
        evaluate_tuples(tuples, 3, chunk=1, checkpoint_dir=tmp_path)
