"""Exact arithmetic in F_p[x] and in the model fields K_f = F_p[x]/(f).

A field element is identified everywhere downstream with its integer code
sum(a_i * p**i), the constant term being the least significant digit. The code
doubles as the vertex index of every graph built from a model.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from sympy import divisors, factorint, isprime, primefactors

from fieldgraph.errors import (MixedModelError, PolynomialSyntaxError,
                               ReducibleModulusError, ValidationError,
                               ZeroInversionError)

logger = logging.getLogger(__name__)

MAX_PRIME = 2 ** 32

_ALLOWED = re.compile(r'^[0-9x^+*, ]+$')
_TERM = re.compile(r'^(?:(\d+)(\*)?)?(x(?:\^(\d+))?)?$')
_SPLIT_NUMBER = re.compile(r'\d\s+\d')


def check_prime(p):
    """Raise ValidationError unless p is a prime fitting in a machine word"""
    if isinstance(p, bool) or not isinstance(p, int) or not 2 <= p < MAX_PRIME or not isprime(p):
        raise ValidationError(f'{p!r} is not a prime below 2^32')
    return p


@dataclass(frozen=True)
class Poly:
    """Polynomial over F_p; coeffs[i] is the coefficient of x^i, no trailing zeros"""

    p: int
    coeffs: tuple = ()

    def __post_init__(self):
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValidationError(f'coefficients of {self.coeffs} must lie in [0, {self.p - 1}]')
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValidationError('leading coefficient of a nonzero polynomial must be nonzero')

    @classmethod
    def from_coeffs(cls, p, coeffs: Sequence[int]) -> 'Poly':
        reduced = [int(c) % p for c in coeffs]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        return cls(p, tuple(reduced))

    @classmethod
    def monomial(cls, p, exponent, coefficient=1) -> 'Poly':
        return cls.from_coeffs(p, [0] * exponent + [coefficient])

    @property
    def degree(self):
        """Degree, -1 for the zero polynomial"""
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def sort_key(self):
        """Lexicographic key on (degree, a_{n-1}, ..., a_0)"""
        return (self.degree, tuple(reversed(self.coeffs)))

    def _same_field(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if other.p != self.p:
            raise MixedModelError(f'cannot combine polynomials over F_{self.p} and F_{other.p}')
        return other

    def __add__(self, other):
        other = self._same_field(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly.from_coeffs(self.p, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return Poly.from_coeffs(self.p, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._same_field(other)
        return self + (-other)

    def __mul__(self, other):
        other = self._same_field(other)
        if self.is_zero or other.is_zero:
            return Poly(self.p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly.from_coeffs(self.p, out)

    def scale(self, c):
        return Poly.from_coeffs(self.p, [c * a for a in self.coeffs])

    def __divmod__(self, other):
        other = self._same_field(other)
        if other.is_zero:
            raise ZeroInversionError('polynomial division by zero')
        p = self.p
        rem = list(self.coeffs)
        inv_lead = pow(other.coeffs[-1], -1, p)
        dq = other.degree
        quot = [0] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] % p
            if not c:
                continue
            factor = c * inv_lead % p
            quot[i - dq] = factor
            for j, b in enumerate(other.coeffs):
                rem[i - dq + j] -= factor * b
        return Poly.from_coeffs(p, quot), Poly.from_coeffs(p, rem[:dq])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self):
        if self.is_zero:
            return self
        return self.scale(pow(self.coeffs[-1], -1, self.p))

    def __str__(self):
        return format_poly(self)


def format_poly(f: Poly) -> str:
    """Canonical text form, e.g. 'x^4 + 2*x^2 + 3'"""
    terms = []
    for e in range(f.degree, -1, -1):
        c = f.coeffs[e]
        if not c:
            continue
        if e == 0:
            terms.append(str(c))
            continue
        mono = 'x' if e == 1 else f'x^{e}'
        terms.append(mono if c == 1 else f'{c}*{mono}')
    return ' + '.join(terms) or '0'


def parse_poly(text: str, p: int) -> Poly:
    """Parse 'x^2+x+2', '3*x^2 + 5x + 7' or a coefficient list '2,1,1' (constant first).

    Coefficients are reduced mod p, never rejected.
    """
    check_prime(p)
    s = (text or '').strip()
    if not s or not _ALLOWED.match(s):
        raise PolynomialSyntaxError(f'malformed polynomial {text!r}')
    if ',' in s:
        parts = [t.strip() for t in s.split(',')]
        if not all(t.isdigit() for t in parts):
            raise PolynomialSyntaxError(f'malformed coefficient list {text!r}')
        return Poly.from_coeffs(p, [int(t) for t in parts])

    coeffs = {}
    for raw in s.split('+'):
        if _SPLIT_NUMBER.search(raw):
            raise PolynomialSyntaxError(f'whitespace inside a number in {text!r}')
        term = re.sub(r'\s+', '', raw)
        m = _TERM.match(term)
        if not term or m is None or (m.group(1) is None and m.group(3) is None):
            raise PolynomialSyntaxError(f'malformed term {raw.strip()!r} in {text!r}')
        if m.group(2) and m.group(3) is None:
            raise PolynomialSyntaxError(f'dangling "*" in {text!r}')
        c = int(m.group(1)) if m.group(1) is not None else 1
        if m.group(3) is None:
            e = 0
        else:
            e = int(m.group(4)) if m.group(4) is not None else 1
        coeffs[e] = coeffs.get(e, 0) + c
    top = max(coeffs)
    return Poly.from_coeffs(p, [coeffs.get(e, 0) for e in range(top + 1)])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd"""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_powmod(base: Poly, exponent: int, modulus: Poly) -> Poly:
    result = Poly(base.p, (1,)) % modulus
    base = base % modulus
    while exponent:
        if exponent & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        exponent >>= 1
    return result


def is_irreducible(f: Poly) -> bool:
    """Rabin's test: x^(p^k) = x mod f and gcd(x^(p^(k/q)) - x, f) = 1 for primes q | k"""
    if f.degree < 1:
        raise ValidationError(f'irreducibility is undefined for degree {f.degree}')
    k = f.degree
    if k == 1:
        return True
    g = f.monic()
    x = Poly.monomial(f.p, 1)
    powers = [x]
    for _ in range(k):
        powers.append(poly_powmod(powers[-1], f.p, g))
    if powers[k] != x:
        return False
    return all(poly_gcd(powers[k // q] - x, g).degree == 0 for q in primefactors(k))


def _monic_polys(p, degree) -> Iterator[Poly]:
    """Monic polynomials of a degree, lexicographic in (a_{d-1}, ..., a_0)"""
    for tail in itertools.product(range(p), repeat=degree):
        yield Poly(p, tuple(reversed(tail)) + (1,))


def is_irreducible_trial(f: Poly) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2"""
    if f.degree < 1:
        raise ValidationError(f'irreducibility is undefined for degree {f.degree}')
    for d in range(1, f.degree // 2 + 1):
        for g in _monic_polys(f.p, d):
            if (f % g).is_zero:
                return False
    return True


def mobius(n):
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def necklace_count(p, k):
    """Number of monic irreducible polynomials of degree k over F_p"""
    return sum(mobius(d) * p ** (k // d) for d in divisors(k)) // k


def enumerate_irreducibles(p: int, k: int) -> list:
    """All monic irreducible degree-k polynomials, lexicographic in (a_{k-1}, ..., a_0)"""
    check_prime(p)
    if k < 1:
        raise ValidationError(f'degree must be at least 1, got {k}')
    found = [f for f in _monic_polys(p, k) if is_irreducible(f)]
    logger.debug('enumerated %d irreducible polynomials of degree %d over F_%d', len(found), k, p)
    return found


def reciprocal(f: Poly) -> Poly:
    """Monic reciprocal a_0^{-1} x^n f(1/x)"""
    if f.is_zero or f.coeffs[0] == 0:
        raise ValidationError(f'{f} has zero constant term and no reciprocal')
    return Poly.from_coeffs(f.p, tuple(reversed(f.coeffs))).monic()


def rank_mod_p(rows, p):
    """Rank of an integer matrix over F_p by Gaussian elimination"""
    m = [[c % p for c in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [c * inv % p for c in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                factor = m[r][col]
                m[r] = [(a - factor * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class FieldModel:
    """The model K_f = F_p[x]/(f) with generator set S = {x, x^p, ..., x^(p^(k-1))}"""

    p: int
    f: Poly
    k: int = field(init=False)
    order: int = field(init=False)
    S: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        check_prime(self.p)
        if self.f.p != self.p:
            raise MixedModelError(f'{self.f} is not a polynomial over F_{self.p}')
        if self.f.degree < 1:
            raise ValidationError(f'modulus {self.f} must have degree at least 1')
        if not self.f.is_monic:
            raise ValidationError(f'modulus {self.f} is not monic')
        if not is_irreducible(self.f):
            raise ReducibleModulusError(f'{self.f} is reducible over F_{self.p}')
        object.__setattr__(self, 'k', self.f.degree)
        object.__setattr__(self, 'order', self.p ** self.k)
        gens = [self.from_poly(Poly.monomial(self.p, 1))]
        for _ in range(self.k - 1):
            gens.append(gens[-1].frobenius())
        if len({g.code for g in gens}) != self.k:
            raise ValidationError(f'Frobenius orbit of x in {self} is degenerate')
        object.__setattr__(self, 'S', tuple(gens))

    def __str__(self):
        return f'F_{self.p}[x]/({self.f})'

    @property
    def x(self):
        return self.S[0]

    @property
    def zero(self):
        return FieldElem(self, Poly(self.p))

    @property
    def one(self):
        return self.from_code(1)

    def from_poly(self, poly: Poly) -> 'FieldElem':
        return FieldElem(self, poly % self.f)

    def from_code(self, code: int) -> 'FieldElem':
        if not 0 <= code < self.order:
            raise ValidationError(f'code {code} outside [0, {self.order - 1}]')
        digits = []
        while code:
            code, d = divmod(code, self.p)
            digits.append(d)
        return FieldElem(self, Poly.from_coeffs(self.p, digits))

    def elements(self) -> Iterator['FieldElem']:
        for code in range(self.order):
            yield self.from_code(code)

    def coordinates(self, a: 'FieldElem') -> tuple:
        """Coefficient vector of length k"""
        return a.value.coeffs + (0,) * (self.k - len(a.value.coeffs))


FieldModelLike = Union[Poly, str]


def make_model(p: int, f: FieldModelLike) -> FieldModel:
    """Validated model constructor; f may be given as text"""
    if isinstance(f, str):
        f = parse_poly(f, p)
    return FieldModel(p, f)


@dataclass(frozen=True)
class FieldElem:
    """Element of a model, represented by a polynomial of degree < k"""

    model: FieldModel
    value: Poly

    def __post_init__(self):
        if self.value.degree >= self.model.k:
            raise ValidationError(f'{self.value} is not reduced modulo {self.model.f}')

    @property
    def code(self):
        code = 0
        for c in reversed(self.value.coeffs):
            code = code * self.model.p + c
        return code

    @property
    def is_zero(self):
        return self.value.is_zero

    def _coerce(self, other):
        if isinstance(other, int):
            return self.model.from_poly(Poly.from_coeffs(self.model.p, [other]))
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.model != self.model:
            raise MixedModelError(f'{self.model} and {other.model} are different models')
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElem(self.model, self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElem(self.model, self.value - other.value)

    def __neg__(self):
        return FieldElem(self.model, -self.value)

    def __mul__(self, other):
        other = self._coerce(other)
        return self.model.from_poly(self.value * other.value)

    __rmul__ = __mul__

    def inverse(self):
        """Inverse by the extended Euclidean algorithm"""
        if self.is_zero:
            raise ZeroInversionError(f'0 has no inverse in {self.model}')
        p = self.model.p
        r0, r1 = self.model.f, self.value
        t0, t1 = Poly(p), Poly(p, (1,))
        while not r1.is_zero:
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            t0, t1 = t1, t0 - q * t1
        # r0 is a nonzero constant
        return self.model.from_poly(t0.scale(pow(r0.coeffs[0], -1, p)))

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __pow__(self, exponent: int):
        base = self
        if exponent < 0:
            base, exponent = self.inverse(), -exponent
        return FieldElem(self.model, poly_powmod(base.value, exponent, self.model.f))

    def frobenius(self):
        return self ** self.model.p

    def frobenius_power(self, i: int):
        """a^(p^i)"""
        out = self
        for _ in range(i % self.model.k):
            out = out.frobenius()
        return out

    def __str__(self):
        return format_poly(self.value)


_ARITH = {
    'add': lambda a, b, e: a + b,
    'sub': lambda a, b, e: a - b,
    'mul': lambda a, b, e: a * b,
    'inv': lambda a, b, e: a.inverse(),
    'pow': lambda a, b, e: a ** e,
    'frobenius': lambda a, b, e: a.frobenius(),
}


def elem_arith(a: FieldElem, b: FieldElem = None, op='add', exponent=None) -> FieldElem:
    """Dispatch one of add, sub, mul, inv, pow, frobenius"""
    try:
        action = _ARITH[op]
    except KeyError:
        raise ValidationError(f'unknown operation {op!r}') from None
    if op in ('add', 'sub', 'mul') and b is None:
        raise ValidationError(f'{op} needs two operands')
    if op == 'pow' and exponent is None:
        raise ValidationError('pow needs an exponent')
    return action(a, b, exponent)


def element_order(a: FieldElem) -> int:
    """Multiplicative order, computed from the factorization of p^k - 1"""
    if a.is_zero:
        raise ZeroInversionError('0 has no multiplicative order')
    order = a.model.order - 1
    one = a.model.one
    for q in factorint(order):
        while order % q == 0 and (a ** (order // q)) == one:
            order //= q
    return order


def is_primitive(model: FieldModel) -> bool:
    if model.x.is_zero:
        return False
    return element_order(model.x) == model.order - 1


def is_normal(model: FieldModel) -> bool:
    rows = [model.coordinates(s) for s in model.S]
    return rank_mod_p(rows, model.p) == model.k


def reciprocal_map(model_f: FieldModel, model_g: FieldModel) -> tuple:
    """Codes of K_f mapped by a(x) -> a(t^{-1}) into K_g, where g is the reciprocal of f"""
    if model_f.p != model_g.p or reciprocal(model_f.f) != model_g.f:
        raise ValidationError(f'{model_g.f} is not the reciprocal of {model_f.f}')
    t_inv = model_g.x.inverse()
    powers = [model_g.one]
    for _ in range(model_f.k - 1):
        powers.append(powers[-1] * t_inv)
    image = []
    for a in model_f.elements():
        acc = model_g.zero
        for c, power in zip(a.value.coeffs, powers):
            if c:
                acc = acc + power * c
        image.append(acc.code)
    return tuple(image)
