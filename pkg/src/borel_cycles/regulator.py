"""Numerical evaluation of the regulator power series on a 3-cycle.

Pipeline: bar chain -> standard 4-tuples -> drop/merge -> per tuple scale by
the largest eigenvalue of X X^* -> four cones -> hamida series.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .foxbar import Chain, bar_d, psi
from .matrices import SPECTRAL_MARGIN, MatrixGroup

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 64


class NotACycleError(ValueError):
    pass


class ConvergenceRiskError(ValueError):
    pass


class CheckpointError(RuntimeError):
    pass


class ShapeError(ValueError):
    pass


class Interrupted(RuntimeError):
    """Raised by ``evaluate`` when ``stop_after`` chunks were written."""


@dataclass
class RegTuple:
    coef: int
    mats: tuple          # four complex arrays
    ids: tuple = ()
    grams: tuple = ()    # X X^* per entry, embedded from exact values when available

    def gram_list(self) -> tuple:
        if self.grams:
            return self.grams
        return tuple(x @ x.conj().T for x in self.mats)


@dataclass
class ConeTuple:
    sign: int
    Y: tuple             # Y0, Y1, Y2; the fourth entry is the identity


@dataclass
class SeriesResult:
    value: complex
    partials: list
    m_max: int
    tail_estimate: float
    seconds: float = 0.0
    precision: int = 106
    workers: int = 1
    n_tuples: int = 0
    series_seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": [self.value.real.hex(), self.value.imag.hex()],
            "value_float": [self.value.real, self.value.imag],
            "partials": [[c.real.hex(), c.imag.hex()] for c in self.partials],
            "m_max": self.m_max,
            "tail_estimate": self.tail_estimate,
            "seconds": self.seconds,
            "series_seconds": self.series_seconds,
            "precision": self.precision,
            "workers": self.workers,
            "n_tuples": self.n_tuples,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SeriesResult":
        hx = float.fromhex
        return cls(
            value=complex(hx(obj["value"][0]), hx(obj["value"][1])),
            partials=[complex(hx(a), hx(b)) for a, b in obj["partials"]],
            m_max=obj["m_max"],
            tail_estimate=obj["tail_estimate"],
            seconds=obj.get("seconds", 0.0),
            precision=obj.get("precision", 106),
            workers=obj.get("workers", 1),
            n_tuples=obj.get("n_tuples", 0),
            series_seconds=obj.get("series_seconds", 0.0),
        )


# -- preprocessing ----------------------------------------------------------------

def _perm_sign(p) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def preprocess(chain: Chain, group: MatrixGroup, prec: int = 106) -> list:
    """Drop tuples with a repeated matrix, merge permutations, sort canonically."""
    if chain.kind != "std":
        raise ValueError("preprocess expects a standard chain")
    keys: dict = {}

    def key(g):
        k = keys.get(g)
        if k is None:
            k = group[g].key_bytes()
            keys[g] = k
        return k

    grams: dict = {}

    def gram(g):
        h = grams.get(g)
        if h is None:
            m = group[g]
            h = (m * m.hermitian_ct()).to_numpy(prec)
            grams[g] = h
        return h

    merged: dict = {}
    for t, c in chain.terms.items():
        if len(set(t)) < len(t):
            continue
        order = sorted(range(len(t)), key=lambda i: key(t[i]))
        canon = tuple(t[i] for i in order)
        merged[canon] = merged.get(canon, 0) + c * _perm_sign(order)
    out = []
    for t in sorted(merged, key=lambda t: tuple(key(g) for g in t)):
        c = merged[t]
        if c:
            out.append(RegTuple(c, tuple(group[g].to_numpy(prec) for g in t), t, tuple(gram(g) for g in t)))
    return out


# -- cones --------------------------------------------------------------------

def tuple_scale(mats, grams=None) -> float:
    """Largest eigenvalue of X X^* over the tuple, with the safety margin."""
    if grams is None:
        grams = [x @ x.conj().T for x in mats]
    best = max(float(np.linalg.eigvalsh(g)[-1]) for g in grams)
    return best * (1.0 + SPECTRAL_MARGIN)


def cone_decompose(t: RegTuple, lam: float) -> list:
    bound = max(float(np.linalg.eigvalsh(x @ x.conj().T)[-1]) for x in t.mats)
    if lam < bound:
        raise ConvergenceRiskError(f"scale {lam} below the spectral bound {bound}")
    X = [np.asarray(x, dtype=np.complex128) / lam for x in t.mats]
    signs = (-1, 1, -1, 1)
    return [ConeTuple(signs[i] * t.coef, tuple(X[:i] + X[i + 1:])) for i in range(4)]


# -- the series ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def _weight(l1: int, l2: int) -> float:
    return float(Fraction(math.factorial(l1) * math.factorial(l2), math.factorial(l1 + l2 + 2)))


@lru_cache(maxsize=None)
def _prefix_counts(n: int):
    """Digit counts (l1, l2) of the 3^n words, in the order used by the prefixes."""
    if n == 0:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    a1, a2 = _prefix_counts(n - 1)
    return (np.concatenate([a1, a1 + 1, a1]), np.concatenate([a2, a2, a2 + 1]))


@lru_cache(maxsize=None)
def _classes(k: int) -> tuple:
    return tuple((b1, b2) for b1 in range(k + 1) for b2 in range(k + 1 - b1))


@lru_cache(maxsize=None)
def _weight_table(n: int, k: int) -> np.ndarray:
    a1, a2 = _prefix_counts(n)
    cls = _classes(k)
    W = np.empty((len(a1), len(cls)))
    for c, (b1, b2) in enumerate(cls):
        W[:, c] = [_weight(int(x) + b1, int(y) + b2) for x, y in zip(a1, a2)]
    return W


def _u_mats(Y0, Y1, Y2):
    I = np.eye(Y0.shape[-1], dtype=np.complex128)
    H = lambda Y: Y @ np.conj(np.swapaxes(Y, -1, -2))
    G0 = H(Y0)
    return G0 - I, H(Y1) - G0, H(Y2) - G0


def hamida_batch(Y0, Y1, Y2, m_start: int, m_end: int) -> np.ndarray:
    """Per-m terms C_m for a batch of cones; returns shape (T, m_end - m_start + 1)."""
    Y0, Y1, Y2 = (np.asarray(y, dtype=np.complex128) for y in (Y0, Y1, Y2))
    if Y0.ndim == 2:
        Y0, Y1, Y2 = Y0[None], Y1[None], Y2[None]
    if not (Y0.shape == Y1.shape == Y2.shape) or Y0.shape[-1] != Y0.shape[-2]:
        raise ShapeError("cone matrices must be square and of equal shape")
    return hamida_u(*_u_mats(Y0, Y1, Y2), m_start, m_end)


def hamida_u(U0, U1, U2, m_start: int, m_end: int) -> np.ndarray:
    """Series terms from the U matrices directly, batched over the first axis.

    Prefix words A are enumerated over all 3^n digit strings with incremental
    products.  Suffix words B enter only through the digit counts in the weight,
    so they are summed per count class before the trace is taken.
    """
    if not 1 <= m_start <= m_end:
        raise ValueError("need 1 <= m_start <= m_end")
    U = tuple(np.asarray(x, dtype=np.complex128) for x in (U0, U1, U2))
    T, N = U[0].shape[0], U[0].shape[-1]
    I = np.broadcast_to(np.eye(N, dtype=np.complex128), (T, 1, N, N))

    # prefixes P[n]: (T, 3^n, N, N); AU1, AU2 flattened for the trace products
    P = [I]
    for n in range(1, m_end + 1):
        prev = P[-1]
        P.append(np.concatenate([prev @ U[d][:, None] for d in range(3)], axis=1))
    AU1 = [None] + [(P[n] @ U[1][:, None]).reshape(T, -1, N * N) for n in range(1, m_end + 1)]
    AU2 = [None] + [(P[n] @ U[2][:, None]).reshape(T, -1, N * N) for n in range(1, m_end + 1)]

    # suffix class sums S[k][class]: (T, C_k, N, N); stored as transposes of B U2, B U1
    S = [{(0, 0): np.broadcast_to(np.eye(N, dtype=np.complex128), (T, N, N))}]
    for k in range(1, m_end):
        nxt: dict = {}
        for (b1, b2), M in S[-1].items():
            for d, key in ((0, (b1, b2)), (1, (b1 + 1, b2)), (2, (b1, b2 + 1))):
                term = M @ U[d]
                nxt[key] = term if key not in nxt else nxt[key] + term
        S.append(nxt)
    BU2T, BU1T = [], []
    for k in range(m_end):
        stack = np.stack([S[k][c] for c in _classes(k)], axis=1)          # (T, C, N, N)
        BU2T.append(np.swapaxes(stack @ U[2][:, None], -1, -2).reshape(T, -1, N * N))
        BU1T.append(np.swapaxes(stack @ U[1][:, None], -1, -2).reshape(T, -1, N * N))

    out = np.zeros((T, m_end - m_start + 1), dtype=np.complex128)
    for m in range(m_start, m_end + 1):
        sgn = -1.0 if m % 2 == 0 else 1.0
        acc = np.zeros(T, dtype=np.complex128)
        for n in range(1, m + 1):
            k = m - n
            tr = AU1[n] @ np.swapaxes(BU2T[k], -1, -2) - AU2[n] @ np.swapaxes(BU1T[k], -1, -2)
            cmn = np.einsum("tac,ac->t", tr, _weight_table(n, k))
            acc += sgn * 3.0 * n / (m + 2) * cmn
        out[:, m - m_start] = acc
    return out


def hamida(Y0, Y1, Y2, m_start: int, m_end: int) -> complex:
    return complex(hamida_batch(Y0, Y1, Y2, m_start, m_end)[0].sum())


def hamida_naive(Y0, Y1, Y2, m_start: int, m_end: int) -> complex:
    """Literal loop over all base-3 words, without any caching."""
    Y0, Y1, Y2 = (np.asarray(y, dtype=np.complex128) for y in (Y0, Y1, Y2))
    N = Y0.shape[0]
    Id = np.eye(N, dtype=np.complex128)
    U = [Y0 @ Y0.conj().T - Id, Y1 @ Y1.conj().T - Y0 @ Y0.conj().T, Y2 @ Y2.conj().T - Y0 @ Y0.conj().T]
    result = 0j
    for m in range(m_start, m_end + 1):
        cm = 0j
        for n in range(1, m + 1):
            cmn = 0j
            for k in range(3 ** m):
                L = [(k // 3 ** i) % 3 for i in range(m)]
                A, B = Id, Id
                for d in L[:n]:
                    A = A @ U[d]
                for d in L[n:]:
                    B = B @ U[d]
                l1, l2 = L.count(1), L.count(2)
                c = A @ U[1] @ B @ U[2] - A @ U[2] @ B @ U[1]
                cmn += np.trace(c) * _weight(l1, l2)
            cm += (-1) ** (m - 1) * 3 * n * cmn / (m + 2)
        result += cm
    return result


# -- tail -----------------------------------------------------------------------

def tail_estimate(partials) -> float:
    """Geometric extrapolation from the median ratio of the last terms."""
    mags = [abs(complex(c)) for c in partials]
    if len(mags) < 3:
        raise ValueError("tail_estimate needs at least 3 partials")
    if mags[-1] == 0.0:
        return 0.0
    tail = mags[-4:]
    ratios = []
    for a, b in zip(tail, tail[1:]):
        ratios.append(math.inf if a == 0.0 else b / a)
    r = float(np.median(ratios))
    if not r < 1.0:
        return math.inf
    return mags[-1] * r / (1.0 - r)


# -- evaluation driver --------------------------------------------------------------

def _chunk_job(args):
    U0, U1, U2, signs, owner, ntup, m_max = args
    per_cone = hamida_u(U0, U1, U2, 1, m_max)
    out = np.zeros((ntup, m_max), dtype=np.complex128)
    # cones of one tuple are combined in their fixed order (-H1 + H2 - H3 + H4)
    for i in range(per_cone.shape[0]):
        out[owner[i]] += signs[i] * per_cone[i]
    return out


def cone_u(grams, lam: float) -> list:
    """U matrices of the four cones; Gram differences are formed before scaling
    so that equal exact entries cancel to an exact zero."""
    I = np.eye(grams[0].shape[0], dtype=np.complex128)
    s = 1.0 / (lam * lam)
    out = []
    for i in range(4):
        a, b, c = (grams[j] for j in range(4) if j != i)
        out.append((a * s - I, (b - a) * s, (c - a) * s))
    return out


CONE_SIGNS = (-1, 1, -1, 1)


def _prepare(tuples: list):
    """Stack cone U matrices; returns arrays plus a content digest."""
    U = [[], [], []]
    signs, owner = [], []
    h = hashlib.sha256()
    for ti, t in enumerate(tuples):
        h.update(str(t.coef).encode())
        grams = t.gram_list()
        for x in tuple(t.mats) + tuple(grams):
            h.update(np.ascontiguousarray(x, dtype=np.complex128).tobytes())
        lam = tuple_scale(t.mats, grams)
        for i, us in enumerate(cone_u(grams, lam)):
            for a in range(3):
                U[a].append(us[a])
            signs.append(float(CONE_SIGNS[i] * t.coef))
            owner.append(ti)
    if not tuples:
        return None, h.hexdigest()
    return (np.array(U[0]), np.array(U[1]), np.array(U[2]), np.array(signs), np.array(owner)), h.hexdigest()


def chunk_size(m_max: int) -> int:
    """Tuples per work item; depends only on m_max so results never depend on workers."""
    return min(DEFAULT_CHUNK, max(1, (DEFAULT_CHUNK * 3 ** 6) // 3 ** m_max))


class Checkpoint:
    """JSON-lines file: a header, then one checksummed record per finished chunk."""

    def __init__(self, path: Path, header: dict):
        self.path = Path(path)
        self.header = header
        self.done: dict = {}
        if self.path.exists():
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w") as f:
                f.write(json.dumps({"header": header}, sort_keys=True) + "\n")

    def _load(self):
        with open(self.path) as f:
            lines = f.read().splitlines()
        if not lines:
            raise CheckpointError("empty checkpoint file")
        try:
            head = json.loads(lines[0])["header"]
        except (ValueError, KeyError) as exc:
            raise CheckpointError("unreadable checkpoint header") from exc
        if head != self.header:
            raise CheckpointError("checkpoint belongs to a different chain or configuration")
        for ln in lines[1:]:
            if not ln.strip():
                continue
            try:
                rec = json.loads(ln)
                body = json.dumps(rec["rows"], sort_keys=True)
            except (ValueError, KeyError) as exc:
                raise CheckpointError("corrupt checkpoint record") from exc
            if hashlib.sha256(body.encode()).hexdigest() != rec.get("sha256"):
                raise CheckpointError(f"checksum mismatch in chunk {rec.get('chunk')}")
            arr = np.array([[complex(float.fromhex(a), float.fromhex(b)) for a, b in row] for row in rec["rows"]],
                           dtype=np.complex128)
            self.done[rec["chunk"]] = arr

    def write(self, chunk: int, arr: np.ndarray):
        rows = [[[z.real.hex(), z.imag.hex()] for z in map(complex, row)] for row in arr]
        body = json.dumps(rows, sort_keys=True)
        rec = {"chunk": chunk, "rows": rows, "sha256": hashlib.sha256(body.encode()).hexdigest()}
        with open(self.path, "a") as f:
            f.write(json.dumps(rec) + "\n")
            f.flush()
            os.fsync(f.fileno())
        self.done[chunk] = arr


def evaluate_tuples(tuples: list, m_max: int, workers: int = 1, checkpoint_dir=None,
                    chunk: int | None = None, precision: int = 106, stop_after: int | None = None) -> SeriesResult:
    t0 = time.perf_counter()
    if m_max < 1:
        raise ValueError("m_max must be positive")
    data, digest = _prepare(tuples)
    if data is None:
        return SeriesResult(0j, [0j] * m_max, m_max, 0.0, time.perf_counter() - t0, precision, workers, 0)
    U0, U1, U2, signs, owner = data
    ntup = len(tuples)
    if chunk is None:
        chunk = chunk_size(m_max)
    bounds = [(s, min(s + chunk, ntup)) for s in range(0, ntup, chunk)]
    jobs = []
    for s, e in bounds:
        sel = (owner >= s) & (owner < e)
        jobs.append((U0[sel], U1[sel], U2[sel], signs[sel], owner[sel] - s, e - s, m_max))

    ck = None
    if checkpoint_dir is not None:
        header = {"digest": digest, "m_max": m_max, "precision": precision, "chunk": chunk, "format": 1}
        ck = Checkpoint(Path(checkpoint_dir) / f"series-{digest[:16]}-m{m_max}.ckpt", header)
    results: dict = dict(ck.done) if ck else {}
    todo = [i for i in range(len(jobs)) if i not in results]

    ts = time.perf_counter()
    written = 0

    def record(i, arr):
        nonlocal written
        results[i] = arr
        if ck:
            ck.write(i, arr)
        written += 1
        if stop_after is not None and written >= stop_after:
            raise Interrupted(f"stopped after {written} chunks")

    if workers <= 1 or len(todo) <= 1:
        for i in todo:
            record(i, _chunk_job(jobs[i]))
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for i, arr in zip(todo, ex.map(_chunk_job, [jobs[i] for i in todo])):
                record(i, arr)
    series_seconds = time.perf_counter() - ts

    per_tuple = np.concatenate([results[i] for i in range(len(jobs))], axis=0)
    partials = [complex(math.fsum(per_tuple[:, m].real), math.fsum(per_tuple[:, m].imag)) for m in range(m_max)]
    value = complex(math.fsum(c.real for c in partials), math.fsum(c.imag for c in partials))
    tail = tail_estimate(partials) if m_max >= 3 else math.inf
    return SeriesResult(value, partials, m_max, tail, time.perf_counter() - t0, precision, workers, ntup,
                        series_seconds)


def evaluate(chain: Chain, group: MatrixGroup, m_max: int, precision: int = 106, workers: int = 1,
             checkpoint_dir=None, skip_verify: bool = False, **kw) -> SeriesResult:
    """Regulator series of a bar 3-cycle (or a standard chain of 4-tuples)."""
    if chain.kind == "bar":
        if not skip_verify and not bar_d(chain, group).is_zero():
            raise NotACycleError("chain is not a cycle")
        std = psi(chain, group)
    else:
        std = chain
    tuples = preprocess(std, group, precision)
    return evaluate_tuples(tuples, m_max, workers, checkpoint_dir, precision=precision, **kw)


# -- the appendix test tuple ------------------------------------------------------------

def appendix_tuple_exact():
    """The appendix 4-tuple over Q(zeta_3) as a standard chain in dimension 3."""
    from .cyclo import make_field
    from .matrices import ExactMatrix

    F = make_field(3)
    z = F.zeta(1)
    one, zero = F.one(), F.zero()

    def unit_with(i, j, val):
        rows = [[one if r == c else zero for c in range(3)] for r in range(3)]
        rows[i][j] = val
        return ExactMatrix.from_rows(F, rows)

    X0 = unit_with(1, 2, one + z)        # 1/2 + i sqrt(3)/2
    X1 = unit_with(0, 1, -z)             # 1/2 - i sqrt(3)/2
    X2 = unit_with(2, 1, -one - z)       # -1/2 - i sqrt(3)/2
    X3 = ExactMatrix.identity(F, 3)
    g = MatrixGroup(F, 3)
    ch = Chain("std")
    ch.add_term(tuple(g.intern(m) for m in (X0, X1, X2, X3)), 1)
    return ch, g


APPENDIX_VALUE = complex(0.0, -0.00019619972396514289239076477898724383468400458873754)


def appendix_value_exact(prec: int = 60):
    """-64 sqrt(3) i / (3 + sqrt(5))^8 at the given mpmath decimal precision."""
    import mpmath

    with mpmath.workdps(prec):
        return -64 * mpmath.sqrt(3) / (3 + mpmath.sqrt(5)) ** 8
