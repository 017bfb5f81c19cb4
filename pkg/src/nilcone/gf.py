"""Finite fields F_{p^k} with a deterministic modulus.

An element of F_{p^k} = F_p[x]/(m(x)) is stored as the integer
``c_0 + c_1 p + ... + c_{k-1} p^{k-1}`` where ``c_0 + c_1 x + ...`` is its
reduced representative.  All arithmetic methods on :class:`FieldDesc` accept
either Python ints or integer numpy arrays of such encodings and broadcast.

The modulus of F_{p^k} is the monic irreducible polynomial of degree ``k``
whose lower coefficients ``(c_0, ..., c_{k-1})`` give the smallest encoding
``sum c_i p^i``; comparing encodings is lexicographic order read from the
coefficient of ``x^{k-1}`` down to the constant term.  For ``k = 1`` the
modulus is ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DivisionByZero, FieldMismatch, NonPrime, SizeLimitExceeded

MAX_P = 64
MAX_ORDER = 2**20
#: default cap on the total degree of on-demand extensions
EXTENSION_CAP = 8

_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q = p**k`` or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            return (p, k) if q == 1 else None
    return None


# -- polynomial helpers over F_p; polynomials are coefficient lists, low first.


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim(list(f))
    g = _trim(list(g))
    inv_lead = pow(g[-1], p - 2, p)
    while len(f) >= len(g):
        c = f[-1] * inv_lead % p
        shift = len(f) - len(g)
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
        _trim(f)
    return f


def _pmulmod(f: list[int], g: list[int], m: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _pmod(out, m, p)


def _pgcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _pmod(f, g, p)
    return f


def _ppowmod(f: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(f, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test for a polynomial over F_p (coefficients low first)."""
    f = _trim([c % p for c in poly])
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    xpow = [0, 1]
    for _ in range(k // 2):
        xpow = _ppowmod(xpow, p, f, p)
        diff = list(xpow) + [0] * max(0, 2 - len(xpow))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        if low[0] == 0:
            continue
        if is_irreducible(low + [1], p):
            return tuple(low + [1])
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldDesc:
    """The finite field F_{p^k}; immutable and hashable."""

    __slots__ = ("p", "k", "modulus", "q", "_tables")

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "modulus", tuple(modulus))
        object.__setattr__(self, "q", p**k)
        object.__setattr__(self, "_tables", None)

    def __setattr__(self, name, value):
        raise AttributeError("FieldDesc is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, FieldDesc)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (FieldDesc, (self.p, self.k, self.modulus))

    # -- lazy tables -----------------------------------------------------

    def _poly_mul(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        fa = [(a // p**i) % p for i in range(k)]
        fb = [(b // p**i) % p for i in range(k)]
        prod = _pmulmod(fa, fb, list(self.modulus), p)
        return sum(c * p**i for i, c in enumerate(prod))

    def _build_tables(self):
        q, p, k = self.q, self.p, self.k
        tables = {}
        if k > 1:
            order = q - 1
            primes = [d for d in range(2, order + 1) if order % d == 0 and is_prime(d)]
            gen = None
            for g in range(2, q):
                x, ok = g, True
                for ell in primes:
                    if self._pow_slow(g, order // ell) == 1:
                        ok = False
                        break
                if ok:
                    gen = g
                    break
            exp = np.zeros(2 * order, dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            x = 1
            for i in range(order):
                exp[i] = x
                log[x] = i
                x = self._poly_mul(x, gen)
            exp[order:] = exp[:order]
            tables["exp"], tables["log"] = exp, log
            if p != 2:
                digits = np.array(
                    [[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64
                )
                tables["digits"] = digits
                tables["weights"] = p ** np.arange(k, dtype=np.int64)
        if q <= _TABLE_LIMIT:
            a = np.arange(q, dtype=np.int64)
            tables["add"] = self._add_raw(a[:, None], a[None, :], tables)
            tables["mul"] = self._mul_raw(a[:, None], a[None, :], tables)
            tables["neg"] = self._sub_raw(np.zeros(q, dtype=np.int64), a, tables)
        object.__setattr__(self, "_tables", tables)
        return tables

    @property
    def tables(self) -> dict:
        t = self._tables
        return t if t is not None else self._build_tables()

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._poly_mul(result, base)
            base = self._poly_mul(base, base)
            e >>= 1
        return result

    def _add_raw(self, a, b, t):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.k == 1:
            return (a + b) % self.p
        d = t["digits"]
        return ((d[a] + d[b]) % self.p) @ t["weights"]

    def _sub_raw(self, a, b, t):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.k == 1:
            return (a - b) % self.p
        d = t["digits"]
        return ((d[a] - d[b]) % self.p) @ t["weights"]

    def _mul_raw(self, a, b, t):
        if self.k == 1:
            return (a * b) % self.p
        exp, log = t["exp"], t["log"]
        out = exp[log[a] + log[b]]
        return np.where((np.asarray(a) == 0) | (np.asarray(b) == 0), 0, out)

    # -- public arithmetic (broadcasting) ---------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        t = self.tables
        if "add" in t:
            return t["add"][a, b]
        return self._add_raw(np.asarray(a), np.asarray(b), t)

    def sub(self, a, b):
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def neg(self, a):
        if self.p == 2:
            return a
        if self.k == 1:
            return (-a) % self.p
        t = self.tables
        if "neg" in t:
            return t["neg"][a]
        return self._sub_raw(np.zeros_like(np.asarray(a)), np.asarray(a), t)

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        t = self.tables
        if "mul" in t:
            return t["mul"][a, b]
        return self._mul_raw(np.asarray(a), np.asarray(b), t)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise DivisionByZero("inverse of zero")
        if self.k == 1:
            if isinstance(a, np.ndarray):
                return np.array([pow(int(x), self.p - 2, self.p) for x in a.ravel()]).reshape(a.shape)
            return pow(int(a), self.p - 2, self.p)
        t = self.tables
        return t["exp"][(self.q - 1 - t["log"][a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        a = int(a)
        if e < 0:
            a, e = int(self.inv(a)), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.k == 1:
            return pow(a, e, self.p)
        t = self.tables
        return int(t["exp"][(int(t["log"][a]) * e) % (self.q - 1)])

    def frobenius(self, a):
        """``a -> a**p``."""
        if self.k == 1:
            return a
        t = self.tables
        out = t["exp"][(t["log"][a] * self.p) % (self.q - 1)]
        return np.where(np.asarray(a) == 0, 0, out)

    def sqrt2(self, a):
        """Square root in characteristic 2, where squaring is bijective."""
        if self.p != 2:
            raise ValueError("sqrt2 needs characteristic 2")
        if self.k == 1:
            return a
        t = self.tables
        out = t["exp"][(t["log"][a] * (self.q // 2)) % (self.q - 1)]
        return np.where(np.asarray(a) == 0, 0, out)

    def elements(self) -> range:
        return range(self.q)

    def element(self, value) -> "FieldElem":
        if isinstance(value, (list, tuple)):
            value = sum(int(c) % self.p * self.p**i for i, c in enumerate(value))
        value = int(value)
        if not 0 <= value < self.q:
            raise ValueError(f"{value} does not encode an element of {self!r}")
        return FieldElem(self, value)

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    @property
    def char(self) -> int:
        return self.p


def make_field(p: int, k: int = 1) -> FieldDesc:
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p > MAX_P:
        raise SizeLimitExceeded(f"characteristic {p} above {MAX_P}")
    if k < 1:
        raise ValueError("degree must be >= 1")
    if p**k > MAX_ORDER:
        raise SizeLimitExceeded(f"{p}^{k} exceeds 2^20")
    return _make_field(p, k)


@lru_cache(maxsize=None)
def _make_field(p: int, k: int) -> FieldDesc:
    return FieldDesc(p, k, smallest_irreducible(p, k))


def field_of_order(q: int) -> FieldDesc:
    pk = prime_power(q)
    if pk is None:
        raise NonPrime(f"{q} is not a prime power")
    return make_field(*pk)


@dataclass(frozen=True)
class FieldElem:
    field: FieldDesc
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        p = self.field.p
        return tuple((self.value // p**i) % p for i in range(self.field.k))

    def _check(self, other) -> "FieldElem":
        if isinstance(other, int):
            return self.field.element(self.field.from_int(other))
        if not isinstance(other, FieldElem) or other.field != self.field:
            raise FieldMismatch(f"{other!r} is not in {self.field!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElem(self.field, int(self.field.add(self.value, other.value)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FieldElem(self.field, int(self.field.sub(self.value, other.value)))

    def __neg__(self):
        return FieldElem(self.field, int(self.field.neg(self.value)))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElem(self.field, int(self.field.mul(self.value, other.value)))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElem(self.field, int(self.field.inv(self.value)))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field!r}({self.value})"


def arith(op: str, a: FieldElem, b=None) -> FieldElem:
    """Dispatch ``add | sub | mul | inv | pow`` on field elements."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a**b
    raise ValueError(f"unknown operation {op!r}")


class Embedding:
    """Injective ring map ``source -> target`` given by a lookup table."""

    def __init__(self, source: FieldDesc, target: FieldDesc, table: np.ndarray):
        self.source = source
        self.target = target
        self.table = table
        self.table.setflags(write=False)

    def __call__(self, a):
        if isinstance(a, FieldElem):
            if a.field != self.source:
                raise FieldMismatch("element not in the source field")
            return FieldElem(self.target, int(self.table[a.value]))
        return self.table[a]

    def compose(self, other: "Embedding") -> "Embedding":
        """``other`` after ``self``."""
        return Embedding(self.source, other.target, other.table[self.table].copy())


def identity_embedding(F: FieldDesc) -> Embedding:
    return Embedding(F, F, np.arange(F.q, dtype=np.int64))


def extend(F: FieldDesc, m: int) -> tuple[FieldDesc, Embedding]:
    """Degree ``m`` extension of ``F`` together with the embedding of ``F``."""
    if m < 2:
        raise ValueError("extension degree must be >= 2")
    if F.p ** (F.k * m) > MAX_ORDER:
        raise SizeLimitExceeded(f"{F.p}^{F.k * m} exceeds 2^20")
    E = make_field(F.p, F.k * m)
    # image of the class of x: the smallest root of F's modulus in E
    root = 0
    if F.k > 1:
        for a in range(E.q):
            acc = 0
            for c in reversed(F.modulus):
                acc = int(E.add(E.mul(acc, a), c))
            if acc == 0:
                root = a
                break
    table = np.zeros(F.q, dtype=np.int64)
    for v in range(F.q):
        acc = 0
        for i in reversed(range(F.k)):
            c = (v // F.p**i) % F.p
            acc = int(E.add(E.mul(acc, root), c))
        table[v] = acc
    return E, Embedding(F, E, table)
