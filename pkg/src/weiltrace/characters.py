"""Dirichlet characters, Gauss sums and the von Mangoldt function.

Characters mod ``q`` are built with Conrey's labelling: for each ``m`` coprime
to ``q`` the character ``chi_q(m, .)`` is a product of local characters on
the cyclic factors of the unit group.  ``index`` is the 0-based position in
the list sorted by ``m``, so index 0 is always the principal character and
``"q.index"`` names a character uniquely.
"""
import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from sympy import factorint, primitive_root

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    values: np.ndarray = field(repr=False, compare=False)
    parity: int
    conductor: int
    root_number: complex
    is_primitive: bool
    conrey: int
    index: int
    ramification: tuple = (0.0, 0.0)

    def __call__(self, n):
        return self.values[np.asarray(n) % self.modulus]

    @property
    def label(self):
        return f"{self.modulus}.{self.index}"

    @property
    def is_principal(self):
        return bool(np.all((self.values == 0) | (self.values == 1)))

    @property
    def delta(self):
        """1 when the L-function has a pole at s = 1 (principal character)."""
        return 1 if self.is_principal else 0

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.values.imag) < 1e-12))

    def conjugate(self):
        vals = np.conj(self.values)
        match = [c for c in enumerate_characters(self.modulus) if np.allclose(c.values, vals, atol=1e-12)]
        return match[0]

    def primitive(self):
        """The primitive character mod ``conductor`` inducing this one."""
        if self.is_primitive:
            return self
        for c in enumerate_characters(self.conductor):
            if c.is_primitive and _agrees(self, c):
                return c
        raise DomainError("no inducing primitive character found")


def _agrees(chi, prim):
    q = chi.modulus
    for n in range(1, q):
        if math.gcd(n, q) == 1 and abs(chi.values[n] - prim.values[n % prim.modulus]) > 1e-9:
            return False
    return True


def _local_logs(p, e):
    """Discrete logarithm data for the unit group mod ``p^e``.

    Returns a list of ``(order, log_table)`` pairs for its cyclic factors;
    ``log_table[n]`` is the exponent of ``n`` (or -1 when ``p | n``).
    """
    pe = p ** e
    if p == 2:
        if e == 1:
            return []
        sign = np.full(pe, -1, dtype=np.int64)
        five = np.full(pe, -1, dtype=np.int64)
        x = 1
        for b in range(max(1, pe // 4)):
            for a, val in ((0, x), (1, (-x) % pe)):
                sign[val] = a
                five[val] = b
            x = x * 5 % pe
        if e == 2:
            return [(2, sign)]
        return [(2, sign), (pe // 4, five)]
    g = primitive_root(pe)
    order = pe - pe // p
    table = np.full(pe, -1, dtype=np.int64)
    x = 1
    for k in range(order):
        table[x] = k
        x = x * g % pe
    return [(order, table)]


def _character_table(q, m, factors):
    vals = np.ones(q, dtype=np.complex128)
    n = np.arange(q)
    coprime = np.gcd(n, q) == 1
    for (p, e), logs in factors:
        pe = p ** e
        for order, table in logs:
            phase = table[m % pe] * table[n % pe] % order
            vals = vals * np.exp(2j * np.pi * phase / order)
    vals[~coprime] = 0.0
    # snap to exact small roots of unity
    vals.real[np.abs(vals.real) < 1e-15] = 0.0
    vals.imag[np.abs(vals.imag) < 1e-15] = 0.0
    return vals


def _conductor(q, vals):
    for d in sorted(_divisors(q)):
        ok = True
        for n in range(1, q, d):
            if math.gcd(n, q) == 1 and abs(vals[n] - 1.0) > 1e-9:
                ok = False
                break
        if ok:
            return d
    return q


def _divisors(n):
    out = [1]
    for p, e in factorint(n).items():
        out = [d * p ** k for d in out for k in range(e + 1)]
    return out


def _gauss_sum_values(vals, q):
    n = np.arange(q)
    return complex(np.sum(vals * np.exp(2j * np.pi * n / q)))


@lru_cache(maxsize=64)
def enumerate_characters(q):
    """All ``phi(q)`` characters mod ``q`` ordered by Conrey label."""
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise ParameterError(f"modulus must be a positive integer, got {q!r}")
    q = int(q)
    if q > 10 ** 6:
        raise ParameterError("modulus above 10^6 is not supported")
    factors = [((p, e), _local_logs(p, e)) for p, e in sorted(factorint(q).items())]
    labels = [m for m in range(1, q + 1) if math.gcd(m, q) == 1] if q > 1 else [1]
    out = []
    for index, m in enumerate(labels):
        vals = _character_table(q, m % q, factors) if q > 1 else np.ones(1, dtype=np.complex128)
        parity = 0 if q <= 2 or abs(vals[q - 1] - 1.0) < 1e-9 else 1
        conductor = _conductor(q, vals) if q > 1 else 1
        primitive = conductor == q
        vals.setflags(write=False)
        root = _root_number(vals, q, parity) if primitive else complex("nan")
        out.append(DirichletCharacter(q, vals, parity, conductor, root, primitive, m, index, (float(parity), 0.0)))
    if out[0].conductor != 1:
        raise AssertionError("principal character must come first")
    return tuple(out)


def _root_number(vals, q, parity):
    if q == 1:
        return 1.0 + 0j
    return _gauss_sum_values(vals, q) / ((1j ** parity) * math.sqrt(q))


def character(label):
    """Look up ``"q.index"``."""
    try:
        q, idx = (int(x) for x in str(label).split("."))
    except ValueError:
        raise ParameterError(f"character id must look like 'q.index', got {label!r}") from None
    chars = enumerate_characters(q)
    if not 0 <= idx < len(chars):
        raise ParameterError(f"index {idx} out of range for modulus {q} ({len(chars)} characters)")
    return chars[idx]


def gauss_sum(chi):
    """``tau(chi) = sum_a chi(a) e^{2 pi i a / q}`` for primitive ``chi``."""
    if not chi.is_primitive:
        raise DomainError(f"character {chi.label} is not primitive")
    return _gauss_sum_values(chi.values, chi.modulus)


def von_mangoldt(n):
    """``log p`` if ``n`` is a power of the prime ``p``, else 0."""
    n = int(n)
    if n < 2:
        return 0.0
    p = _smallest_prime_factor(n)
    while n % p == 0:
        n //= p
    return math.log(p) if n == 1 else 0.0


def _smallest_prime_factor(n):
    if n % 2 == 0:
        return 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return d
        d += 2
    return n


def von_mangoldt_table(limit):
    """``Lambda(n)`` for ``0 <= n <= limit`` by sieving."""
    limit = int(limit)
    lam = np.zeros(limit + 1)
    if limit < 2:
        return lam
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(limit)) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    for p in np.flatnonzero(sieve):
        pk = int(p)
        lp = math.log(pk)
        while pk <= limit:
            lam[pk] = lp
            pk *= int(p)
    return lam


class LocalFactorCheck(NamedTuple):
    closed_form: complex
    series: complex
    ramified: bool


def local_factor_logderiv_check(p, chi, s, terms=200):
    """``d/ds log (1 - chi(p) p^{-s})^{-1}`` in closed form and as the series
    ``-log p sum_{n>=1} chi(p)^n p^{-ns}``."""
    s = complex(s)
    if not s.real > 1:
        raise DomainError("the local series needs Re s > 1")
    if von_mangoldt(p) != math.log(p) or _smallest_prime_factor(p) != p:
        raise ParameterError(f"{p} is not prime")
    if chi.conductor % p == 0:
        return LocalFactorCheck(0j, 0j, True)
    # the local factor at p of L(s, chi) is that of the inducing primitive character
    c = complex(chi.primitive()(p))
    lp = math.log(p)
    x = c * cmath.exp(-s * lp)
    closed = -lp * x / (1.0 - x)
    n = np.arange(1, terms + 1)
    series = -lp * complex(np.sum(c ** n * np.exp(-n * s * lp)))
    return LocalFactorCheck(closed, series, False)
