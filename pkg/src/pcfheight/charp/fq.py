"""Finite fields F_{p^k} with table arithmetic.

An element is the integer whose base-p digits (least significant first) are
its coefficients in the basis 1, x, ..., x^(k-1) modulo the field's modulus.
Integer order on encodings is therefore a fixed lexicographic order on
polynomials, which is the enumeration order used in every scan.  The modulus
is the smallest monic primitive polynomial of degree k, ordering candidates
lexicographically by (c_{k-1}, ..., c_0); :data:`MODULUS_TABLE` lists the
small cases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from ..arith import ArgumentError

# (p, k) -> modulus coefficients, constant first.  Checked against the search in tests.
MODULUS_TABLE = {
    (2, 1): (1, 1), (2, 2): (1, 1, 1), (2, 3): (1, 1, 0, 1), (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (3, 1): (1, 1), (3, 2): (2, 1, 1), (3, 3): (1, 2, 0, 1), (3, 4): (2, 1, 0, 0, 1),
    (5, 1): (2, 1), (5, 2): (2, 1, 1), (5, 3): (2, 3, 0, 1), (5, 4): (2, 2, 1, 0, 1),
    (5, 5): (2, 4, 0, 0, 0, 1),
    (7, 1): (2, 1), (7, 2): (3, 1, 1), (7, 3): (2, 3, 0, 1),
}


def _is_primitive(mod_low: tuple[int, ...], p: int) -> bool:
    k = len(mod_low) - 1
    if not gf_irreducible_p(list(reversed(mod_low)), p, ZZ):
        return False
    q = p ** k
    # x has order q-1 iff x^((q-1)/r) != 1 for each prime r | q-1
    from sympy import factorint

    def mulmod(a, b):
        out = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % p
        for i in range(len(out) - 1, k - 1, -1):
            c = out[i]
            if c:
                for j in range(k + 1):
                    out[i - k + j] = (out[i - k + j] - c * mod_low[j]) % p
        return out[:k]

    def powx(e):
        res = [1] + [0] * (k - 1)
        base = ([0, 1] + [0] * (k - 2)) if k > 1 else [(-mod_low[0]) % p]
        while e:
            if e & 1:
                res = mulmod(res, base)
            base = mulmod(base, base)
            e >>= 1
        return res

    one = [1] + [0] * (k - 1)
    return all(powx((q - 1) // r) != one for r in factorint(q - 1))


def find_primitive_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic primitive polynomial of degree k (constant first)."""
    # lexicographic on (c_{k-1}, ..., c_0), i.e. integer order of the lower coefficients
    for tail in itertools.product(range(p), repeat=k):
        low = tuple(reversed(tail)) + (1,)
        if low[0] != 0 and _is_primitive(low, p):
            return low
    raise ArithmeticError("no primitive polynomial found")


class FqField:
    """F_{p^k} with exp/log/Zech tables (k >= 1)."""

    def __init__(self, p: int, k: int):
        if k < 1:
            raise ArgumentError("k must be >= 1")
        self.p, self.k, self.q = p, k, p ** k
        self.modulus = MODULUS_TABLE.get((p, k)) or find_primitive_modulus(p, k)
        q, n = self.q, self.q - 1
        exp = [0] * n
        log = [-1] * q
        digits = [1] + [0] * (k - 1)
        for i in range(n):
            val = self._encode(digits)
            exp[i] = val
            log[val] = i
            # multiply by x
            top = digits[-1]
            digits = [0] + digits[:-1]
            if top:
                digits = [(digits[j] - top * self.modulus[j]) % p for j in range(k)]
        if len(set(exp)) != n:
            raise ArithmeticError("modulus is not primitive")
        self.exp, self.log = exp, log
        # zech[i] = log(1 + x^i), or -1 when 1 + x^i = 0
        zech = [-1] * n
        for i in range(n):
            s = self._add_digits(exp[i], 1)
            zech[i] = log[s] if s else -1
        self.zech = zech

    def _encode(self, digits) -> int:
        v = 0
        for c in reversed(digits):
            v = v * self.p + c
        return v

    def _decode(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _add_digits(self, a: int, b: int) -> int:
        da, db = self._decode(a), self._decode(b)
        return self._encode([(x + y) % self.p for x, y in zip(da, db)])

    # int-level arithmetic -----------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self.log[a], self.log[b]
        z = self.zech[(lb - la) % (self.q - 1)]
        return 0 if z < 0 else self.exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if a == 0 or self.p == 2:
            return a
        # -1 = x^((q-1)/2) for odd q
        return self.exp[(self.log[a] + (self.q - 1) // 2) % (self.q - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def from_int(self, c: int) -> int:
        """Image of an integer (an element of the prime field)."""
        return c % self.p

    def eval_poly(self, coeffs_low: list[int], x: int) -> int:
        acc = 0
        for c in reversed(coeffs_low):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def elements(self) -> range:
        return range(self.q)

    def element(self, a: int) -> "FqElem":
        return FqElem(self, a)


@lru_cache(maxsize=None)
def field(p: int, k: int) -> FqField:
    return FqField(p, k)


@dataclass(frozen=True)
class FqElem:
    """A single element of F_{p^k}; hot loops use the int-level methods of FqField."""

    F: FqField
    value: int

    def __add__(self, o):
        return FqElem(self.F, self.F.add(self.value, self._v(o)))

    def __sub__(self, o):
        return FqElem(self.F, self.F.sub(self.value, self._v(o)))

    def __mul__(self, o):
        return FqElem(self.F, self.F.mul(self.value, self._v(o)))

    def __truediv__(self, o):
        return FqElem(self.F, self.F.mul(self.value, self.F.inv(self._v(o))))

    def __neg__(self):
        return FqElem(self.F, self.F.neg(self.value))

    def _v(self, o) -> int:
        return o.value if isinstance(o, FqElem) else self.F.from_int(o)

    def __eq__(self, o):
        if isinstance(o, int):
            return self.value == self.F.from_int(o)
        return isinstance(o, FqElem) and o.F is self.F and o.value == self.value

    def __hash__(self):
        return hash((self.F.p, self.F.k, self.value))

    def __repr__(self):
        return f"FqElem({self.F.p}^{self.F.k}: {self.F._decode(self.value)})"
