"""Exact arithmetic for the ground structures.

Four ground rings are supported, all with exact arithmetic:

* ``PrimeField(p)``   elements are ints in ``0..p-1``, arithmetic mod p
* ``Rationals()``     elements are ``fractions.Fraction`` (lowest terms,
  positive denominator, guaranteed by the Fraction type)
* ``Integers()``      elements are plain ints
* ``PolyRing(p)``     univariate polynomials over GF(p), stored as tuples of
  coefficients in ascending degree with no trailing zero; ``()`` is zero

On top of the rings sit fixed-dimension vector spaces (elements are tuples of
ring elements), monomial maps ``u -> a * u1^d1 * ... * un^dn`` and polynomial
maps ``u -> sum_i m_i(u) * w_i`` with zero constant term.

Window enumeration orders are frozen so that "first witness" answers from the
search modules are deterministic:

* ``PrimeField``: ``0, 1, ..., p-1``
* ``Integers`` bound A: ``-A, ..., A``
* ``Rationals`` bounds (A, B): every ``a/b`` in lowest terms with ``|a| <= A``
  and ``1 <= b <= B``, in ascending numeric order
* ``PolyRing`` degree bound D: base-p counter order, i.e. the polynomial whose
  coefficient list is the little-endian base-p expansion of ``i`` for
  ``i = 0, 1, ..., p^D - 1`` (sorts by degree, then by coefficients from the
  leading one down)
* vector spaces: cartesian product of the scalar window with coordinate 1
  most significant (last coordinate varies fastest)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


class AlgebraError(ValueError):
    """Dimension, ring or window mismatch in an exact-arithmetic operation."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# window specifications


@dataclass(frozen=True)
class FullWindow:
    """The whole (finite) ring; only valid for PrimeField."""


@dataclass(frozen=True)
class IntegerWindow:
    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise AlgebraError("integer window bound must be >= 0")


@dataclass(frozen=True)
class RationalWindow:
    num_bound: int
    den_bound: int

    def __post_init__(self):
        if self.num_bound < 0 or self.den_bound < 1:
            raise AlgebraError("rational window needs num_bound >= 0, den_bound >= 1")


@dataclass(frozen=True)
class DegreeWindow:
    deg_bound: int  # polynomials of degree < deg_bound

    def __post_init__(self):
        if self.deg_bound < 0:
            raise AlgebraError("degree window bound must be >= 0")


Window = FullWindow | IntegerWindow | RationalWindow | DegreeWindow


# ---------------------------------------------------------------------------
# ground rings


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise AlgebraError(f"{self.p} is not prime")

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def element(self, x) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise AlgebraError(f"not a {self} element: {x!r}")
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, k: int) -> int:
        return pow(a, k, self.p)

    def format_element(self, a: int) -> str:
        return str(a % self.p)

    def parse_element(self, text: str) -> int:
        return self.element(int(text))

    def enumerate_window(self, window: Window) -> list[int]:
        if not isinstance(window, FullWindow):
            raise AlgebraError(f"{self} only supports FullWindow, got {window}")
        return list(range(self.p))

    def __str__(self):
        return f"F_{self.p}"


@dataclass(frozen=True)
class Integers:
    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def element(self, x) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise AlgebraError(f"not an integer: {x!r}")
        return x

    def add(self, a: int, b: int) -> int:
        return a + b

    def sub(self, a: int, b: int) -> int:
        return a - b

    def neg(self, a: int) -> int:
        return -a

    def mul(self, a: int, b: int) -> int:
        return a * b

    def inv(self, a: int) -> int:
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def pow(self, a: int, k: int) -> int:
        return a**k

    def format_element(self, a: int) -> str:
        return str(a)

    def parse_element(self, text: str) -> int:
        return int(text)

    def enumerate_window(self, window: Window) -> list[int]:
        if not isinstance(window, IntegerWindow):
            raise AlgebraError(f"{self} needs an IntegerWindow, got {window}")
        return list(range(-window.bound, window.bound + 1))

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class Rationals:
    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def element(self, x) -> Fraction:
        if isinstance(x, bool):
            raise AlgebraError(f"not a rational: {x!r}")
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise AlgebraError(f"not a rational: {x!r}")

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in Q")
        return 1 / a

    def pow(self, a: Fraction, k: int) -> Fraction:
        return a**k

    def format_element(self, a: Fraction) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def parse_element(self, text: str) -> Fraction:
        return Fraction(text.strip())

    def enumerate_window(self, window: Window) -> list[Fraction]:
        if not isinstance(window, RationalWindow):
            raise AlgebraError(f"{self} needs a RationalWindow, got {window}")
        out = set()
        for b in range(1, window.den_bound + 1):
            for a in range(-window.num_bound, window.num_bound + 1):
                q = Fraction(a, b)
                if abs(q.numerator) <= window.num_bound and q.denominator <= window.den_bound:
                    out.add(q)
        return sorted(out)

    def __str__(self):
        return "Q"


@dataclass(frozen=True)
class PolyRing:
    """Univariate polynomials over GF(p), the additive-group workhorse for
    the countably infinite finite-characteristic case."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise AlgebraError(f"{self.p} is not prime")

    @property
    def zero(self) -> tuple:
        return ()

    @property
    def one(self) -> tuple:
        return (1,)

    def element(self, x) -> tuple:
        if isinstance(x, int) and not isinstance(x, bool):
            x = (x,)
        if not isinstance(x, (tuple, list)):
            raise AlgebraError(f"not a {self} element: {x!r}")
        coeffs = [c % self.p for c in x]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return tuple(coeffs)

    def degree(self, a: tuple) -> int:
        # degree of the zero polynomial is -1 by convention
        return len(a) - 1

    def add(self, a: tuple, b: tuple) -> tuple:
        n = max(len(a), len(b))
        out = [0] * n
        for i, c in enumerate(a):
            out[i] = c
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % self.p
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def neg(self, a: tuple) -> tuple:
        return tuple((-c) % self.p for c in a)

    def sub(self, a: tuple, b: tuple) -> tuple:
        return self.add(a, self.neg(b))

    def mul(self, a: tuple, b: tuple) -> tuple:
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, c in enumerate(a):
            if c == 0:
                continue
            for j, d in enumerate(b):
                out[i + j] = (out[i + j] + c * d) % self.p
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def inv(self, a: tuple) -> tuple:
        # units are the nonzero constants
        if len(a) != 1:
            raise ZeroDivisionError(f"{a} is not a unit in {self}")
        return (pow(a[0], self.p - 2, self.p),)

    def pow(self, a: tuple, k: int) -> tuple:
        out = self.one
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def format_element(self, a: tuple) -> str:
        return "[" + ",".join(str(c) for c in a) + "]"

    def parse_element(self, text: str) -> tuple:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise AlgebraError(f"bad {self} element: {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return self.element([int(c) for c in inner.split(",")])

    def enumerate_window(self, window: Window) -> list[tuple]:
        if not isinstance(window, DegreeWindow):
            raise AlgebraError(f"{self} needs a DegreeWindow, got {window}")
        out = []
        for i in range(self.p**window.deg_bound):
            coeffs = []
            v = i
            while v:
                v, r = divmod(v, self.p)
                coeffs.append(r)
            out.append(tuple(coeffs))
        return out

    def __str__(self):
        return f"F_{self.p}[t]"


GroundRing = PrimeField | Integers | Rationals | PolyRing


# ---------------------------------------------------------------------------
# vector spaces


@dataclass(frozen=True)
class VectorSpace:
    """A fixed-dimension coordinate space over a ground ring.

    Elements are tuples of ring elements.  Shares the additive-group method
    names with the rings (add, neg, sub, zero, format_element, ...) so FS and
    search machinery can treat either uniformly.
    """

    ring: GroundRing
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise AlgebraError("vector space dimension must be >= 1")

    @property
    def zero(self) -> tuple:
        return (self.ring.zero,) * self.dim

    def element(self, coords) -> tuple:
        coords = tuple(self.ring.element(c) for c in coords)
        if len(coords) != self.dim:
            raise AlgebraError(f"expected {self.dim} coordinates, got {len(coords)}")
        return coords

    def add(self, u: tuple, v: tuple) -> tuple:
        self._check(u, v)
        return tuple(self.ring.add(a, b) for a, b in zip(u, v))

    def sub(self, u: tuple, v: tuple) -> tuple:
        self._check(u, v)
        return tuple(self.ring.sub(a, b) for a, b in zip(u, v))

    def neg(self, u: tuple) -> tuple:
        return tuple(self.ring.neg(a) for a in u)

    def scale(self, a, u: tuple) -> tuple:
        return tuple(self.ring.mul(a, c) for c in u)

    def _check(self, u, v):
        if len(u) != self.dim or len(v) != self.dim:
            raise AlgebraError(f"dimension mismatch in {self}")

    def format_element(self, u: tuple) -> str:
        if self.dim == 1:
            return self.ring.format_element(u[0])
        return "(" + ",".join(self.ring.format_element(c) for c in u) + ")"

    def parse_element(self, text: str):
        text = text.strip()
        if self.dim == 1 and not text.startswith("("):
            return (self.ring.parse_element(text),)
        if not (text.startswith("(") and text.endswith(")")):
            raise AlgebraError(f"bad vector: {text!r}")
        parts = _split_top_level(text[1:-1], ",")
        return self.element([self.ring.parse_element(p) for p in parts])

    def enumerate_window(self, window: Window) -> list[tuple]:
        scalars = self.ring.enumerate_window(window)
        return [tuple(v) for v in itertools.product(scalars, repeat=self.dim)]

    def __str__(self):
        return f"{self.ring}^{self.dim}"


def _split_top_level(text: str, sep: str) -> list[str]:
    # split on sep outside any bracket pair; poly coefficients use commas too
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (q.strip() for q in parts) if p]


Group = GroundRing | VectorSpace
"""Anything with the additive-group slice of the ring interface."""


def scalar_space(ring: GroundRing) -> GroundRing:
    """The ring acting as its own rank-1 additive group."""
    return ring


def window_enumerate(group: Group, window: Window) -> list:
    """All window elements, each exactly once, in the frozen canonical order."""
    return group.enumerate_window(window)


# ---------------------------------------------------------------------------
# monomial and polynomial maps


@dataclass(frozen=True)
class Monomial:
    """u -> coeff * u_1^{e_1} * ... * u_n^{e_n} with the exponents not all zero.

    A zero coeff is allowed and yields the zero map.
    """

    ring: GroundRing
    coeff: object
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeff", self.ring.element(self.coeff))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if not self.exponents or any(e < 0 for e in self.exponents):
            raise AlgebraError("exponents must be a non-empty tuple of ints >= 0")
        if all(e == 0 for e in self.exponents):
            raise AlgebraError("exponents must not all be zero")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def total_degree(self) -> int:
        return sum(self.exponents)

    def factor_coordinates(self) -> list[int]:
        """Coordinate index (0-based) used by each of the ``total_degree``
        linear factors, in order: coordinate k repeated exponents[k] times."""
        out = []
        for k, e in enumerate(self.exponents):
            out.extend([k] * e)
        return out

    def __call__(self, u: tuple):
        return eval_monomial(self, u)


def eval_monomial(m: Monomial, u: tuple):
    """Exact value of the monomial at a coordinate tuple from the same ring."""
    if len(u) != m.n:
        raise AlgebraError(f"monomial in {m.n} variables applied to {len(u)} coordinates")
    r = m.ring
    acc = r.element(m.coeff)
    for c, e in zip(u, m.exponents):
        acc = r.mul(acc, r.pow(r.element(c), e))
    return acc


@dataclass(frozen=True)
class PolynomialMap:
    """u -> sum_i m_i(u) * w_i, a map with zero constant term from ring^n into
    a target additive group (a vector space over the ring, or the ring itself)."""

    ring: GroundRing
    n: int
    target: Group
    terms: tuple  # of (Monomial, target element) pairs

    def __post_init__(self):
        if not self.terms:
            raise AlgebraError("polynomial map needs at least one term")
        checked = []
        for m, w in self.terms:
            if m.ring != self.ring or m.n != self.n:
                raise AlgebraError("monomial ring/arity mismatch in polynomial map")
            checked.append((m, self.target.element(w) if isinstance(self.target, VectorSpace) else self.target.element(w)))
        object.__setattr__(self, "terms", tuple(checked))

    def __call__(self, u: tuple):
        return eval_poly(self, u)

    def describe(self) -> str:
        parts = []
        for m, _w in self.terms:
            factors = []
            if m.coeff != m.ring.one:
                factors.append(m.ring.format_element(m.coeff))
            for k, e in enumerate(m.exponents):
                name = "u" if m.n == 1 else f"x{k + 1}"
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors) if factors else m.ring.format_element(m.coeff))
        return " + ".join(parts)


def eval_poly(phi: PolynomialMap, u: tuple):
    """Exact value of the polynomial map; eval_poly(phi, 0) is the target zero."""
    u = tuple(phi.ring.element(c) for c in u)
    if len(u) != phi.n:
        raise AlgebraError(f"polynomial map in {phi.n} variables applied to {len(u)} coordinates")
    tgt = phi.target
    acc = tgt.zero
    for m, w in phi.terms:
        val = eval_monomial(m, u)
        contrib = tgt.scale(val, w) if isinstance(tgt, VectorSpace) else tgt.mul(val, w)
        acc = tgt.add(acc, contrib)
    return acc


def scalar_poly_map(ring: GroundRing, monomials) -> PolynomialMap:
    """Convenience: a ring-valued polynomial map sum_i m_i(u) * 1."""
    monomials = list(monomials)
    n = monomials[0].n
    return PolynomialMap(ring, n, ring, tuple((m, ring.one) for m in monomials))


def telescope_expansion(m: Monomial, u_gamma: tuple, alphas: list[tuple]):
    """The 2^d signed terms of the product expansion in which each linear
    factor u_gamma(k) is rewritten as (u_gamma(k) + u_alpha(k)) - u_alpha(k),
    one alpha vector per factor position.

    Yields (sign, value) with sign in {+1, -1}; the signed sum equals the
    plain monomial value.
    """
    r = m.ring
    coords = m.factor_coordinates()
    d = len(coords)
    if len(alphas) != d:
        raise AlgebraError(f"need {d} alpha vectors, got {len(alphas)}")
    u_gamma = tuple(r.element(c) for c in u_gamma)
    alphas = [tuple(r.element(c) for c in a) for a in alphas]
    if len(u_gamma) != m.n or any(len(a) != m.n for a in alphas):
        raise AlgebraError("coordinate arity mismatch in telescope expansion")
    for picks in itertools.product((True, False), repeat=d):
        val = r.element(m.coeff)
        sign = 1
        for j, take_sum in enumerate(picks):
            k = coords[j]
            if take_sum:
                val = r.mul(val, r.add(u_gamma[k], alphas[j][k]))
            else:
                val = r.mul(val, alphas[j][k])
                sign = -sign
        yield sign, val


def telescope_check(m: Monomial, u_gamma: tuple, alphas: list[tuple]) -> bool:
    """Validate the expansion code path: distribute into 2^d signed terms,
    sum, and compare with the directly evaluated monomial.  Always true."""
    r = m.ring
    total = r.zero
    for sign, val in telescope_expansion(m, u_gamma, alphas):
        total = r.add(total, val) if sign > 0 else r.sub(total, val)
    return total == eval_monomial(m, u_gamma)
