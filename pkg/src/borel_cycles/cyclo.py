"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis 1, z, ..., z^(d-1) with d = deg Phi_n,
as a tuple of integer numerators over one positive common denominator.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

import mpmath


class FieldError(ValueError):
    pass


class InvalidConductorError(FieldError):
    pass


class FieldMismatchError(FieldError):
    pass


class ZeroDivisorError(ZeroDivisionError):
    pass


def _poly_divmod(num, den):
    """Exact division of integer polynomials (lowest degree first), den monic."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        if c:
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic_poly(d))
            assert not any(rem)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class CycField:
    """The field Q(zeta_n) with zeta_n = exp(2 pi i / n)."""

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 2:
            raise InvalidConductorError(f"conductor must be an integer >= 2, got {n!r}")
        self.n = n
        self.phi = cyclotomic_poly(n)
        self.degree = d = len(self.phi) - 1
        # zeta^k for k < 2d-1 reduced to the power basis
        table = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(2 * d - 1):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(d):
                    cur[i] -= top * self.phi[i]
        self.reduction = tuple(table)
        self._zeta_pows = None

    def __repr__(self):
        return f"CycField({self.n})"

    def __reduce__(self):
        return (make_field, (self.n,))

    # constructors
    def __call__(self, value) -> "CycNumber":
        if isinstance(value, CycNumber):
            self._check(value)
            return value
        if isinstance(value, (int, Rational)):
            q = Fraction(value)
            return CycNumber._make(self, (q.numerator,) + (0,) * (self.degree - 1), q.denominator)
        if isinstance(value, str):
            return parse_element(self, value)
        raise TypeError(f"cannot convert {value!r} into {self}")

    def from_coeffs(self, coeffs) -> "CycNumber":
        """Element from d rational coefficients in the power basis."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != self.degree:
            raise FieldError(f"expected {self.degree} coefficients, got {len(coeffs)}")
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        return CycNumber._make(self, tuple(int(c * den) for c in coeffs), den)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def zeta(self, k: int = 1) -> "CycNumber":
        """The power zeta_n^k (k taken mod n)."""
        k %= self.n
        if self._zeta_pows is None:
            pows = [self.one()]
            z = self.from_coeffs([0, 1] + [0] * (self.degree - 2)) if self.degree > 1 else self(-1)
            for _ in range(self.n - 1):
                pows.append(pows[-1] * z)
            self._zeta_pows = pows
        return self._zeta_pows[k]

    def _check(self, a: "CycNumber"):
        if a.field is not self and a.field.n != self.n:
            raise FieldMismatchError(f"{a.field} is not {self}")


@lru_cache(maxsize=None)
def make_field(n: int) -> CycField:
    return CycField(n)


class CycNumber:
    """Immutable element of Q(zeta_n)."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: CycField, coeffs):
        other = field.from_coeffs(coeffs)
        self.field, self.num, self.den = field, other.num, other.den
        self._hash = None

    @classmethod
    def _make(cls, field, num, den):
        g = den
        for c in num:
            g = gcd(g, c)
            if g == 1:
                break
        if g != 1:
            num = tuple(c // g for c in num)
            den //= g
        obj = object.__new__(cls)
        obj.field, obj.num, obj.den, obj._hash = field, num, den, None
        return obj

    def __reduce__(self):
        return (_rebuild, (self.field.n, self.num, self.den))

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def key(self) -> tuple:
        return (self.num, self.den)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycNumber):
            return self.field.n == other.field.n and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.n, self.num, self.den))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, CycNumber):
            if other.field is not self.field and other.field.n != self.field.n:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Rational)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return CycNumber._make(self.field, tuple(a + b for a, b in zip(self.num, o.num)), self.den)
        return CycNumber._make(
            self.field,
            tuple(a * o.den + b * self.den for a, b in zip(self.num, o.num)),
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNumber._make(self.field, tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.field.degree
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(o.num):
                    if b:
                        prod[i + j] += a * b
        out = prod[:d]
        table = self.field.reduction
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = table[k]
                for i in range(d):
                    out[i] += c * row[i]
        return CycNumber._make(self.field, tuple(out), self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisorError("inverse of zero")
        d = self.field.degree
        if self.is_rational():
            return self.field(Fraction(self.den, self.num[0]))
        # solve (multiplication by self) x = 1 over Q
        cols = []
        basis = [self.field.from_coeffs([1 if i == k else 0 for i in range(d)]) for k in range(d)]
        for b in basis:
            cols.append((self * b).coeffs)
        mat = [[cols[j][i] for j in range(d)] + [Fraction(1 if i == 0 else 0)] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if mat[r][c] != 0)
            mat[c], mat[piv] = mat[piv], mat[c]
            pv = mat[c][c]
            mat[c] = [x / pv for x in mat[c]]
            for r in range(d):
                if r != c and mat[r][c] != 0:
                    f = mat[r][c]
                    mat[r] = [x - f * y for x, y in zip(mat[r], mat[c])]
        return self.field.from_coeffs([mat[i][d] for i in range(d)])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "CycNumber":
        """Complex conjugate, i.e. the automorphism zeta -> zeta^(n-1)."""
        f = self.field
        acc = f.zero()
        for k, c in enumerate(self.num):
            if c:
                acc = acc + f.zeta(-k) * c
        return CycNumber._make(f, acc.num, acc.den * self.den)

    def embed(self, prec: int = 106) -> mpmath.mpc:
        """Image under zeta -> exp(2 pi i/n), to `prec` bits."""
        if prec < 53:
            raise ValueError("precision must be at least 53 bits")
        with mpmath.workprec(prec + 10):
            z = mpmath.expjpi(mpmath.mpf(2) / self.field.n)
            acc = mpmath.mpc(0)
            p = mpmath.mpc(1)
            for c in self.num:
                if c:
                    acc += c * p
                p *= z
            acc /= self.den
        with mpmath.workprec(prec):
            return +acc

    def __complex__(self):
        return complex(self.embed(53))

    def to_strings(self) -> list:
        return [str(c) for c in self.coeffs]

    def __repr__(self):
        return f"CycNumber({self.field.n}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)


def _rebuild(n, num, den):
    return CycNumber._make(make_field(n), num, den)


def format_element(a: CycNumber, var: str = "z") -> str:
    terms = []
    for k, c in enumerate(a.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if k == 0:
            s = str(c)
        elif c == 1:
            s = mono
        elif c == -1:
            s = "-" + mono
        else:
            s = f"{c}*{mono}"
        terms.append(s)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += (" - " + t[1:]) if t.startswith("-") else (" + " + t)
    return out


def parse_element(field: CycField, text: str) -> CycNumber:
    """Parse a polynomial in z (or 'zeta') with rational coefficients.

    Accepts e.g. "z", "-1 - z", "1/2*z^2 + 3", "zeta".
    """
    import ast

    src = text.replace("^", "**").replace("zeta", "z")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise FieldError(f"cannot parse field element {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return field(node.value)
        if isinstance(node, ast.Name) and node.id == "z":
            return field.zeta(1)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            if isinstance(node.op, ast.Pow) and isinstance(node.right, (ast.Constant, ast.UnaryOp)):
                exp = node.right
                k = -exp.operand.value if isinstance(exp, ast.UnaryOp) else exp.value
                return a ** int(k)
        raise FieldError(f"unsupported syntax in field element {text!r}")

    return ev(tree)


def to_json(a: CycNumber) -> dict:
    return {"conductor": a.field.n, "coeffs": a.to_strings()}


def from_json(obj: dict) -> CycNumber:
    field = make_field(int(obj["conductor"]))
    return field.from_coeffs([Fraction(s) for s in obj["coeffs"]])
