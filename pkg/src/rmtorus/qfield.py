"""Exact arithmetic for real quadratic irrationalities and SL2(Z) data.

A value is stored in the canonical form (p + q*sqrt(D)) / r with

    * D squarefree, D > 1            (rationals are normalised to q = 0, D = 2)
    * r > 0
    * gcd(p, q, r) = 1

so equality, hashing and comparisons are structural.  All predicates that the
rest of the package relies on (signs, floors, lattice membership, fixed-point
checks) are decided in integer arithmetic; floats only appear when a value is
explicitly converted via ``to_float``/``float()``, which evaluates sqrt(D)
with mpmath scratch precision before rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath

from .precision import working_dps

_RATIONAL_D = 2


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s*s*m and m squarefree."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, m, d = 1, n, 2
    while d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            s *= d
        d += 1
    return s, m


class QuadIrr:
    """Element (p + q*sqrt(D))/r of a real quadratic field (or of Q)."""

    __slots__ = ("p", "q", "r", "D")

    def __init__(self, p: int, q: int, r: int, D: int):
        if r == 0:
            raise ZeroDivisionError("zero denominator")
        if q != 0:
            s, m = _squarefree_split(D)
            if m == 1:
                p, q = p + q * s, 0
            else:
                q, D = q * s, m
        if q == 0:
            D = _RATIONAL_D
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "D", D)

    def __setattr__(self, *a):
        raise AttributeError("QuadIrr is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, x) -> "QuadIrr":
        f = Fraction(x)
        return cls(f.numerator, 0, f.denominator, _RATIONAL_D)

    @classmethod
    def sqrt_of(cls, D: int) -> "QuadIrr":
        return cls(0, 1, 1, D)

    @classmethod
    def parse(cls, text: str) -> "QuadIrr":
        """Parse the grammar "(p+q*sqrtD)/r" with integer literals.

        Accepted shapes include "(1+sqrt5)/2", "(-5+sqrt5)/10", "sqrt2",
        "2*sqrt3", "(1-2*sqrt3)/7", "3/4" and "7".
        """
        import re

        s = text.strip().replace(" ", "")
        m = re.fullmatch(
            r"(?:\((?P<inner>[^()]+)\)|(?P<bare>[^()/]+))(?:/(?P<den>-?\d+))?", s
        )
        if not m:
            raise ValueError(f"cannot parse quadratic irrationality {text!r}")
        body = m.group("inner") if m.group("inner") is not None else m.group("bare")
        r = int(m.group("den")) if m.group("den") else 1
        mm = re.fullmatch(
            r"(?:(?P<p>[+-]?\d+)(?=[+-]))?"
            r"(?P<sgn>[+-])?(?:(?P<q>\d+)\*?)?sqrt(?P<D>\d+)",
            body,
        )
        if mm:
            p = int(mm.group("p")) if mm.group("p") else 0
            q = int(mm.group("q")) if mm.group("q") else 1
            if mm.group("sgn") == "-":
                q = -q
            return cls(p, q, r, int(mm.group("D")))
        mm = re.fullmatch(r"[+-]?\d+", body)
        if mm:
            return cls(int(body), 0, r, _RATIONAL_D)
        raise ValueError(f"cannot parse quadratic irrationality {text!r}")

    # -- structure ---------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("value is irrational")
        return Fraction(self.p, self.r)

    def conjugate(self) -> "QuadIrr":
        """Galois conjugate (p - q*sqrt(D))/r."""
        return QuadIrr(self.p, -self.q, self.r, self.D)

    def norm(self) -> Fraction:
        return Fraction(self.p * self.p - self.q * self.q * self.D, self.r * self.r)

    def trace_rat(self) -> Fraction:
        return Fraction(2 * self.p, self.r)

    def minimal_polynomial(self) -> tuple[int, int, int]:
        """Primitive (A, B, C), A > 0, with A*x^2 + B*x + C = 0 at this value."""
        if self.is_rational:
            raise ValueError("rational value has no primitive quadratic polynomial")
        A = self.r * self.r
        B = -2 * self.p * self.r
        C = self.p * self.p - self.q * self.q * self.D
        g = gcd(gcd(A, B), C)
        return A // g, B // g, C // g

    def discriminant(self) -> int:
        A, B, C = self.minimal_polynomial()
        return B * B - 4 * A * C

    # -- arithmetic --------------------------------------------------------

    def _coerced(self, other) -> "QuadIrr | None":
        if isinstance(other, QuadIrr):
            if other.q == 0 or self.q == 0 or other.D == self.D:
                return other
            raise ValueError("mixed radicands")
        if isinstance(other, (int, Fraction)):
            return QuadIrr.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        D = self.D if self.q else o.D
        return QuadIrr(
            self.p * o.r + o.p * self.r,
            self.q * o.r + o.q * self.r,
            self.r * o.r,
            D,
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadIrr(-self.p, -self.q, self.r, self.D)

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        D = self.D if self.q else o.D
        return QuadIrr(
            self.p * o.p + self.q * o.q * D,
            self.p * o.q + self.q * o.p,
            self.r * o.r,
            D,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadIrr":
        n = self.p * self.p - self.q * self.q * self.D
        if self.q == 0:
            if self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return QuadIrr(self.r, 0, self.p, _RATIONAL_D)
        return QuadIrr(self.r * self.p, -self.r * self.q, n, self.D)

    def __truediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadIrr.from_rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order -------------------------------------------------------------

    def sign(self) -> int:
        return _sign_sum(self.p, self.q, self.D)

    def __eq__(self, other):
        try:
            o = self._coerced(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return (self.p, self.q, self.r, self.D) == (o.p, o.q, o.r, o.D)

    def __hash__(self):
        if self.is_rational:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.D))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __floor__(self) -> int:
        if self.q == 0:
            return self.p // self.r
        s = isqrt(self.q * self.q * self.D)
        num_lo = self.p + (s if self.q > 0 else -s - 1)
        n = num_lo // self.r
        while self - (n + 1) >= 0:
            n += 1
        while self - n < 0:
            n -= 1
        return n

    def frac(self) -> "QuadIrr":
        """Fractional part: self - floor(self), in [0, 1)."""
        return self - math.floor(self)

    # -- numeric conversion --------------------------------------------------

    def to_mpf(self) -> mpmath.mpf:
        with mpmath.workdps(working_dps()):
            val = (mpmath.mpf(self.p) + mpmath.mpf(self.q) * mpmath.sqrt(self.D)) / self.r
            return +val

    def __float__(self) -> float:
        if self.q == 0:
            return self.p / self.r
        return float(self.to_mpf())

    def to_float(self) -> float:
        return float(self)

    # -- io ------------------------------------------------------------------

    def __str__(self):
        """Canonical "(p+q*sqrtD)/r" form, matching the parse grammar."""
        if self.q == 0:
            return str(self.p) if self.r == 1 else f"{self.p}/{self.r}"
        if self.q == 1:
            rad = f"sqrt{self.D}"
        elif self.q == -1:
            rad = f"-sqrt{self.D}"
        else:
            rad = f"{self.q}*sqrt{self.D}"
        inner = rad if self.p == 0 else f"{self.p}{'+' if self.q > 0 else ''}{rad}"
        if self.r == 1:
            return inner if self.p == 0 else f"({inner})"
        return f"({inner})/{self.r}"

    def __repr__(self):
        if self.q == 0:
            return f"QuadIrr({self.p}/{self.r})"
        return f"QuadIrr(({self.p}{self.q:+d}*sqrt{self.D})/{self.r})"

    def to_json_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r, "D": self.D}

    @classmethod
    def from_json_dict(cls, d: dict) -> "QuadIrr":
        return cls(int(d["p"]), int(d["q"]), int(d["r"]), int(d["D"]))


def _sign_sum(p: int, q: int, D: int) -> int:
    """Exact sign of p + q*sqrt(D)."""
    if q == 0:
        return _sign(p)
    if p == 0:
        return _sign(q)
    if p > 0 and q > 0:
        return 1
    if p < 0 and q < 0:
        return -1
    if p > 0:
        return _sign(p * p - q * q * D)
    return _sign(q * q * D - p * p)


@dataclass(frozen=True)
class SL2Matrix:
    """Integer matrix [[a, b], [c, d]] with determinant 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det != 1:
            raise ValueError(f"determinant is {self.det}, not 1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @classmethod
    def identity(cls) -> "SL2Matrix":
        return cls(1, 0, 0, 1)

    def __mul__(self, other: "SL2Matrix") -> "SL2Matrix":
        if not isinstance(other, SL2Matrix):
            return NotImplemented
        return SL2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "SL2Matrix":
        if n < 0:
            return self.inverse() ** (-n)
        out = SL2Matrix.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def to_list(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @classmethod
    def from_list(cls, rows) -> "SL2Matrix":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))


@dataclass(frozen=True)
class LatticeElement:
    """Element m + n*theta of the lattice Z + theta*Z."""

    m: int
    n: int

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        return LatticeElement(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        return LatticeElement(self.m - other.m, self.n - other.n)

    def value(self, theta: QuadIrr) -> QuadIrr:
        return theta * self.n + self.m


def moebius_act(g: SL2Matrix, t: QuadIrr) -> QuadIrr:
    """Fractional-linear action (a*t + b)/(c*t + d)."""
    den = t * g.c + g.d
    if den.sign() == 0:
        raise ZeroDivisionError("Moebius action has a pole at this value")
    return (t * g.a + g.b) / den


def fixes(g: SL2Matrix, t: QuadIrr) -> bool:
    """Exact check of c*t^2 + (d - a)*t - b = 0."""
    return (t * t * g.c + t * (g.d - g.a) - g.b).sign() == 0


def cf_expand(t: QuadIrr, max_terms: int = 200) -> tuple[list[int], list[int] | None]:
    """Continued fraction expansion with exact period detection.

    Returns (quotients, period) where ``period`` is the repeating block of
    partial quotients (None if not detected within ``max_terms``; by Lagrange
    this only happens when the cap is too small).
    """
    if t.is_rational:
        raise ValueError("continued fraction period is defined for irrational values")
    quotients: list[int] = []
    seen: dict[QuadIrr, int] = {}
    x = t
    for _ in range(max_terms):
        if x in seen:
            return quotients, quotients[seen[x]:]
        seen[x] = len(quotients)
        a = math.floor(x)
        quotients.append(a)
        x = (x - a).inverse()
    return quotients, None


def convergents(quotients: list[int]) -> list[Fraction]:
    out = []
    h0, h1 = 1, quotients[0]
    k0, k1 = 0, 1
    out.append(Fraction(h1, k1))
    for a in quotients[1:]:
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
    return out


def fixing_matrix(t: QuadIrr, max_trace: int = 10**7) -> SL2Matrix:
    """Minimal-trace g in SL2(Z) with g*t = t, c > 0 and c*t + d > 0.

    g fixes t exactly when (c, d - a, -b) = k*(A, B, C) for the primitive
    minimal polynomial (A, B, C) of t and a positive integer k; det g = 1 then
    reads s^2 - Delta*k^2 = 4 with s = a + d and Delta the discriminant.  The
    search enumerates traces s = 3, 4, ... and checks the divisibility,
    squareness and parity conditions exactly, so the first hit is the
    minimal-trace solution (ties, which cannot occur since k is determined by
    the trace, would be broken lexicographically on (a, b, c, d)).
    """
    if t.is_rational:
        raise ValueError("rational values are not fixed by hyperbolic matrices")
    A, B, C = t.minimal_polynomial()
    delta = B * B - 4 * A * C
    if delta <= 0:
        raise ValueError("value is not a real quadratic irrationality")
    for s in range(3, max_trace + 1):
        m = s * s - 4
        if m % delta:
            continue
        k = isqrt(m // delta)
        if k == 0 or k * k * delta != m:
            continue
        if (s - B * k) % 2:
            continue
        a = (s - B * k) // 2
        cand = SL2Matrix(a, -C * k, A * k, s - a)
        ok = (
            cand.c > 0
            and fixes(cand, t)
            and (t * cand.c + cand.d).sign() > 0
            and cand.trace > 2
        )
        if ok:
            return cand
    raise ValueError(f"no fixing matrix with trace <= {max_trace}")


def rank_value(g: SL2Matrix, n: int, t: QuadIrr) -> QuadIrr:
    """Exact c_n*theta + d_n for the n-th power of g (n >= 0)."""
    if n < 0:
        raise ValueError("rank is defined for n >= 0")
    if not fixes(g, t):
        raise ValueError("matrix does not fix the value")
    gn = g**n
    return t * gn.c + gn.d


def in_theta_lattice(x: QuadIrr, theta: QuadIrr) -> bool:
    """Exact membership of x in Z + theta*Z."""
    if theta.is_rational:
        raise ValueError("lattice basis must be irrational")
    if x.q == 0:
        qn = Fraction(0)
    elif x.D != theta.D:
        return False
    else:
        qn = Fraction(x.q * theta.r, x.r * theta.q)
    if qn.denominator != 1:
        return False
    n = qn.numerator
    mfrac = Fraction(x.p, x.r) - n * Fraction(theta.p, theta.r)
    return mfrac.denominator == 1


def lattice_coordinates(x: QuadIrr, theta: QuadIrr) -> LatticeElement:
    """Write x = m + n*theta exactly, or raise ValueError."""
    if not in_theta_lattice(x, theta):
        raise ValueError("value is not in the lattice")
    if x.q == 0:
        n = 0
    else:
        n = (x.q * theta.r) // (x.r * theta.q)
    m = Fraction(x.p, x.r) - n * Fraction(theta.p, theta.r)
    return LatticeElement(int(m), n)


def fundamental_discriminant(D: int) -> int:
    _, m = _squarefree_split(D)
    return m if m % 4 == 1 else 4 * m


def multiplier_ring(theta: QuadIrr):
    """Conductor f and membership test for {alpha : alpha*(Z + theta*Z) <= Z + theta*Z}.

    The multiplier ring of the lattice Z + theta*Z is the order Z + f*O_K of
    discriminant Delta = disc(minimal polynomial of theta), so f is read off
    from Delta = f^2 * d_K.  The returned predicate decides membership of any
    field element exactly (it checks that alpha*1 and alpha*theta stay in the
    lattice), independently of the conductor formula.
    """
    if theta.is_rational:
        raise ValueError("multiplier ring is defined for irrational values")
    delta = theta.discriminant()
    dk = fundamental_discriminant(theta.D)
    f2, rem = divmod(delta, dk)
    f = isqrt(f2)
    if rem or f * f != f2:
        raise ArithmeticError("discriminant is not f^2 * d_K")

    def is_multiplier(alpha: QuadIrr) -> bool:
        return in_theta_lattice(alpha, theta) and in_theta_lattice(alpha * theta, theta)

    return f, is_multiplier


def ring_generator(D: int) -> QuadIrr:
    """Standard generator omega of the maximal order: (1+sqrt(D))/2 or sqrt(D)."""
    _, m = _squarefree_split(D)
    if m % 4 == 1:
        return QuadIrr(1, 1, 2, m)
    return QuadIrr(0, 1, 1, m)


class RMData:
    """A real quadratic theta together with a fixing matrix and module constant.

    epsilon = (c*theta + d)/c is kept exact; powers of g (entries, exact and
    floating epsilon_n) are cached since every module of degree n uses them.
    """

    def __init__(self, theta: QuadIrr, g: SL2Matrix | None = None):
        if theta.is_rational:
            raise ValueError("theta must be a real quadratic irrationality")
        if g is None:
            g = fixing_matrix(theta)
        if not fixes(g, theta):
            raise ValueError("matrix does not fix theta")
        if g.c <= 0:
            raise ValueError("need c > 0")
        if (theta * g.c + g.d).sign() <= 0:
            raise ValueError("need c*theta + d > 0")
        self.theta = theta
        self.g = g
        self.epsilon = (theta * g.c + g.d) / g.c
        self._powers: dict[int, "ModuleConstants"] = {}

    def power(self, n: int) -> "ModuleConstants":
        if n < 1:
            raise ValueError("module degree must be >= 1")
        if n not in self._powers:
            gn = self.g**n
            eps_q = (self.theta * gn.c + gn.d) / gn.c
            self._powers[n] = ModuleConstants(
                matrix=gn,
                eps_exact=eps_q,
                eps=float(eps_q),
                theta_float=float(self.theta),
            )
        return self._powers[n]

    def __repr__(self):
        return f"RMData(theta={self.theta!r}, g={self.g.to_list()})"

    def to_json_dict(self) -> dict:
        return {"theta": self.theta.to_json_dict(), "g": self.g.to_list()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "RMData":
        return cls(QuadIrr.from_json_dict(d["theta"]), SL2Matrix.from_list(d["g"]))


@dataclass(frozen=True)
class ModuleConstants:
    """Cached per-degree constants: g^n and epsilon_n = (c_n*theta + d_n)/c_n."""

    matrix: SL2Matrix
    eps_exact: QuadIrr
    eps: float
    theta_float: float

    @property
    def c(self) -> int:
        return self.matrix.c

    @property
    def a(self) -> int:
        return self.matrix.a

    @property
    def d(self) -> int:
        return self.matrix.d


@lru_cache(maxsize=None)
def unit_phase(t: QuadIrr, k: int = 1) -> complex:
    """e(k*t) = exp(2*pi*i*k*t), evaluated after exact reduction of k*t mod 1.

    The reduction keeps the argument in [0, 1) no matter how large k*t is, so
    the phase is accurate to rounding even for huge exact numerators.
    """
    import cmath

    frac = (t * k).frac()
    return cmath.exp(2j * math.pi * float(frac))
