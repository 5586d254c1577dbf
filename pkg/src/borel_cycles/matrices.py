"""Exact square matrices over Q(zeta_n), plus an interning group context."""
from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .cyclo import CycField, CycNumber, FieldMismatchError, make_field


class MatrixError(ValueError):
    pass


class SingularMatrixError(MatrixError):
    pass


class InvalidIndexError(MatrixError):
    pass


class ExactMatrix:
    """Immutable N x N matrix with CycNumber entries (row-major)."""

    __slots__ = ("field", "dim", "entries", "_key", "_hash", "_ints")

    def __init__(self, field: CycField, dim: int, entries: Sequence):
        if len(entries) != dim * dim:
            raise MatrixError(f"expected {dim * dim} entries, got {len(entries)}")
        self.field = field
        self.dim = dim
        self.entries = tuple(field(e) for e in entries)
        self._key = None
        self._hash = None
        self._ints = None

    # -- construction helpers
    @classmethod
    def _raw(cls, field, dim, entries):
        obj = object.__new__(cls)
        obj.field, obj.dim, obj.entries = field, dim, entries
        obj._key = obj._hash = obj._ints = None
        return obj

    @classmethod
    def identity(cls, field: CycField, dim: int) -> "ExactMatrix":
        one, zero = field.one(), field.zero()
        return cls._raw(field, dim, tuple(one if i == j else zero for i in range(dim) for j in range(dim)))

    @classmethod
    def from_rows(cls, field: CycField, rows) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise MatrixError("matrix must be square")
        return cls(field, dim, [e for r in rows for e in r])

    @classmethod
    def diagonal(cls, field: CycField, diag) -> "ExactMatrix":
        diag = [field(d) for d in diag]
        dim = len(diag)
        zero = field.zero()
        return cls._raw(field, dim, tuple(diag[i] if i == j else zero for i in range(dim) for j in range(dim)))

    @classmethod
    def elementary(cls, i: int, j: int, lam, dim: int, field: CycField | None = None) -> "ExactMatrix":
        """Identity plus lam at (i, j); indices are 1-based."""
        if field is None:
            if not isinstance(lam, CycNumber):
                raise MatrixError("field required for a rational entry")
            field = lam.field
        if i == j or not (1 <= i <= dim and 1 <= j <= dim):
            raise InvalidIndexError(f"bad elementary index ({i}, {j}) for dimension {dim}")
        ent = list(cls.identity(field, dim).entries)
        ent[(i - 1) * dim + (j - 1)] = field(lam)
        return cls._raw(field, dim, tuple(ent))

    # -- access
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.dim + j]

    def rows(self):
        d = self.dim
        return [list(self.entries[r * d:(r + 1) * d]) for r in range(d)]

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.field.n, self.dim, tuple(e.key for e in self.entries))
        return self._key

    def key_bytes(self) -> bytes:
        """Stable byte encoding of the reduced entries."""
        parts = [f"{self.field.n};{self.dim}"]
        for e in self.entries:
            parts.append(",".join(str(c) for c in e.num) + "/" + str(e.den))
        return "|".join(parts).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.key_bytes()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __repr__(self):
        return "ExactMatrix(" + repr([[str(e) for e in r] for r in self.rows()]) + ")"

    def _check(self, other: "ExactMatrix"):
        if other.field.n != self.field.n:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if other.dim != self.dim:
            raise MatrixError(f"dimension mismatch {self.dim} vs {other.dim}")

    # -- integer form: every entry as numerators over one denominator
    def _int_form(self):
        if self._ints is None:
            den = 1
            for e in self.entries:
                if den % e.den:
                    den = den * e.den // _gcd(den, e.den)
            nums = tuple(tuple(c * (den // e.den) for c in e.num) for e in self.entries)
            self._ints = (den, nums)
        return self._ints

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check(other)
        f, n = self.field, self.dim
        d = f.degree
        table = f.reduction
        da, a = self._int_form()
        db, b = other._int_form()
        den = da * db
        out = []
        make = CycNumber._make
        for i in range(n):
            row = a[i * n:(i + 1) * n]
            for k in range(n):
                acc = [0] * (2 * d - 1)
                nz = False
                for j in range(n):
                    x = row[j]
                    y = b[j * n + k]
                    if not any(x) or not any(y):
                        continue
                    nz = True
                    for s, xs in enumerate(x):
                        if xs:
                            for t, yt in enumerate(y):
                                if yt:
                                    acc[s + t] += xs * yt
                if not nz:
                    out.append(make(f, (0,) * d, 1))
                    continue
                res = acc[:d]
                for p in range(d, 2 * d - 1):
                    c = acc[p]
                    if c:
                        tr = table[p]
                        for q in range(d):
                            res[q] += c * tr[q]
                out.append(make(f, tuple(res), den))
        return ExactMatrix._raw(f, n, tuple(out))

    def scale(self, c) -> "ExactMatrix":
        c = self.field(c)
        return ExactMatrix._raw(self.field, self.dim, tuple(e * c for e in self.entries))

    def __neg__(self):
        return self.scale(-1)

    def is_identity(self) -> bool:
        n = self.dim
        for idx, e in enumerate(self.entries):
            if divmod(idx, n)[0] == idx % n:
                if not (e.den == 1 and e.num[0] == 1 and not any(e.num[1:])):
                    return False
            elif any(e.num):
                return False
        return True

    def det(self) -> CycNumber:
        n = self.dim
        m = self.rows()
        det = self.field.one()
        for c in range(n):
            piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
            if piv is None:
                return self.field.zero()
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            pv = m[c][c]
            det = det * pv
            inv = pv.inverse()
            for r in range(c + 1, n):
                if not m[r][c].is_zero():
                    fac = m[r][c] * inv
                    m[r] = [x - fac * y for x, y in zip(m[r], m[c])]
        return det

    def inverse(self) -> "ExactMatrix":
        n = self.dim
        f = self.field
        one, zero = f.one(), f.zero()
        m = [r + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows())]
        for c in range(n):
            piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            m[c], m[piv] = m[piv], m[c]
            pv = m[c][c]
            if pv != 1:
                inv = pv.inverse()
                m[c] = [x * inv for x in m[c]]
            for r in range(n):
                if r != c and not m[r][c].is_zero():
                    fac = m[r][c]
                    m[r] = [x - fac * y for x, y in zip(m[r], m[c])]
        return ExactMatrix._raw(f, n, tuple(e for r in m for e in r[n:]))

    def hermitian_ct(self) -> "ExactMatrix":
        n = self.dim
        return ExactMatrix._raw(
            self.field, n, tuple(self.entries[j * n + i].conj() for i in range(n) for j in range(n))
        )

    def pad(self, new_dim: int) -> "ExactMatrix":
        """Block-diagonal embedding with an identity block."""
        if new_dim < self.dim:
            raise MatrixError(f"cannot shrink dimension {self.dim} to {new_dim}")
        f, n = self.field, self.dim
        one, zero = f.one(), f.zero()
        ent = []
        for i in range(new_dim):
            for j in range(new_dim):
                if i < n and j < n:
                    ent.append(self.entries[i * n + j])
                else:
                    ent.append(one if i == j else zero)
        return ExactMatrix._raw(f, new_dim, tuple(ent))

    def commutes_with(self, other: "ExactMatrix") -> bool:
        return self * other == other * self

    def is_rational(self) -> bool:
        return all(e.is_rational() for e in self.entries)

    def embed(self, prec: int = 106):
        """Entrywise complex embedding as an mpmath matrix."""
        n = self.dim
        out = mpmath.matrix(n, n)
        for idx, e in enumerate(self.entries):
            out[idx // n, idx % n] = e.embed(prec)
        return out

    def to_numpy(self, prec: int = 106) -> np.ndarray:
        """complex128 image, rounded from a `prec`-bit embedding."""
        n = self.dim
        arr = np.empty((n, n), dtype=np.complex128)
        for idx, e in enumerate(self.entries):
            arr[idx // n, idx % n] = _to_complex(e, prec)
        return arr

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "conductor": self.field.n,
            "entries": [[str(c) for c in e.coeffs] for e in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExactMatrix":
        f = make_field(int(obj["conductor"]))
        dim = int(obj["dim"])
        return cls(f, dim, [f.from_coeffs([Fraction(s) for s in e]) for e in obj["entries"]])


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


_complex_cache: dict = {}


def _to_complex(e: CycNumber, prec: int) -> complex:
    key = (e.field.n, e.num, e.den, prec)
    val = _complex_cache.get(key)
    if val is None:
        z = e.embed(prec)
        val = complex(float(z.real), float(z.imag))
        _complex_cache[key] = val
    return val


def embed_matrix(m: ExactMatrix, prec: int = 106):
    return m.embed(prec)


def hermitian_ct(m: ExactMatrix) -> ExactMatrix:
    return m.hermitian_ct()


SPECTRAL_MARGIN = 1e-12


def spectral_bound(mats: Iterable, prec: int = 106) -> float:
    """Largest eigenvalue of X X^* over the tuple, inflated by a relative margin.

    Accepts ExactMatrix values or complex numpy arrays.
    """
    best = None
    for m in mats:
        x = m.to_numpy(prec) if isinstance(m, ExactMatrix) else np.asarray(m, dtype=np.complex128)
        h = x @ x.conj().T
        ev = float(np.linalg.eigvalsh(h)[-1])
        best = ev if best is None else max(best, ev)
    if best is None:
        raise MatrixError("spectral bound of an empty tuple")
    return best * (1.0 + SPECTRAL_MARGIN)


class MatrixGroup:
    """Interns matrices as positive integer ids and memoizes the group law.

    Words over the matrix alphabet are tuples of signed ids: +k is s_g and
    -k is s_g^{-1} where g = group[k].
    """

    def __init__(self, field: CycField, dim: int):
        self.field = field
        self.dim = dim
        self._mats: list = [None]
        self._ids: dict = {}
        self._mul: dict = {}
        self._inv: dict = {}
        self.e = self.intern(ExactMatrix.identity(field, dim))

    def __len__(self):
        return len(self._mats) - 1

    def intern(self, m: ExactMatrix) -> int:
        if m.dim != self.dim or m.field.n != self.field.n:
            raise MatrixError("matrix does not belong to this group")
        k = m.key
        gid = self._ids.get(k)
        if gid is None:
            gid = len(self._mats)
            self._mats.append(m)
            self._ids[k] = gid
        return gid

    def __getitem__(self, gid: int) -> ExactMatrix:
        return self._mats[gid]

    def find(self, m: ExactMatrix):
        return self._ids.get(m.key)

    def mul(self, a: int, b: int) -> int:
        if a == self.e:
            return b
        if b == self.e:
            return a
        key = (a, b)
        r = self._mul.get(key)
        if r is None:
            r = self.intern(self._mats[a] * self._mats[b])
            self._mul[key] = r
        return r

    def inv(self, a: int) -> int:
        r = self._inv.get(a)
        if r is None:
            r = self.intern(self._mats[a].inverse())
            self._inv[a] = r
            self._inv[r] = a
        return r

    def letter_value(self, letter: int) -> int:
        return letter if letter > 0 else self.inv(-letter)

    def evaluate(self, word: Iterable[int]) -> int:
        acc = self.e
        for x in word:
            acc = self.mul(acc, x if x > 0 else self.inv(-x))
        return acc

    def elementary(self, i: int, j: int, lam) -> int:
        return self.intern(ExactMatrix.elementary(i, j, lam, self.dim, self.field))
