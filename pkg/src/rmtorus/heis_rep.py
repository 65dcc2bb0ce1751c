"""Heisenberg groups, their Stone-von Neumann representations, and the
closed family of Gaussian atoms the real representation acts on.

A Gaussian atom is poly(x) * e(alpha*x^2 + beta*x) with Im(alpha) > 0 and
e(z) = exp(2*pi*i*z); translations, modulations, multiplication by x and
differentiation all stay inside the family, so Schwartz vectors are kept as
finite lists of atoms and every operator below is symbolic on coefficients.
Atoms are merged only on exact (alpha, beta) equality.

Two Heisenberg groups are implemented over K = R^2 (parameter eps > 0, cocycle
psi(x, y) = e((x1*y2 - y1*x2)/(2*eps))) and over K = (Z/cZ)^2 (cocycle
psi = e((n1*m2 - m1*n2)/(2c))).  The finite group keeps its central phase as
an exact Fraction of a turn, so composition laws and the representation
property can be checked in exact rational arithmetic; complex numbers appear
only when a vector entry is finally produced.

The representation on f in S(R) is U_{(lam, y)} f(x) = lam * e((x*y2 +
y1*y2/2)/eps) * f(x + y1); on C(Z/cZ) it is U phi([n]) = lam * e((n*m2 +
m1*m2/2)/c) * phi([n + m1]).  Lie derivatives of the real representation along
the standard basis are d/dx, 2*pi*i*x/eps and 2*pi*i; the holomorphic vector
f_tau = e(tau*x^2/(2*eps)) spans the kernel of delta_A - tau*delta_B.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_TWO_PI_I = 2j * math.pi


def _e(z: complex) -> complex:
    return cmath.exp(_TWO_PI_I * z)


def cis_turns(t: Fraction) -> complex:
    """exp(2*pi*i*t) for an exact number of turns."""
    return cmath.exp(_TWO_PI_I * float(t % 1))


class GaussianAtom:
    """poly(x) * e(alpha*x^2 + beta*x), Im(alpha) > 0."""

    __slots__ = ("poly", "alpha", "beta")

    def __init__(self, poly, alpha, beta=0.0):
        alpha = complex(alpha)
        if not alpha.imag > 0:
            raise ValueError("need Im(alpha) > 0 for a decaying atom")
        poly = tuple(complex(c) for c in poly)
        while len(poly) > 1 and poly[-1] == 0:
            poly = poly[:-1]
        if not poly:
            poly = (0.0 + 0.0j,)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", complex(beta))

    def __setattr__(self, *a):
        raise AttributeError("GaussianAtom is immutable")

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.poly)

    def value(self, x):
        p = np.polynomial.polynomial.polyval(x, np.asarray(self.poly))
        return p * np.exp(_TWO_PI_I * (self.alpha * np.asarray(x) ** 2 + self.beta * np.asarray(x)))

    def scaled(self, z) -> "GaussianAtom":
        return GaussianAtom(tuple(z * c for c in self.poly), self.alpha, self.beta)

    def translate(self, t) -> "GaussianAtom":
        """Atom of x -> value(x + t)."""
        t = complex(t) if isinstance(t, complex) else float(t)
        n = len(self.poly)
        shifted = [0j] * n
        # binomial re-expansion of poly(x + t)
        powers = [1.0 + 0j]
        for _ in range(n - 1):
            powers.append(powers[-1] * t)
        for k, c in enumerate(self.poly):
            if c == 0:
                continue
            binom = 1
            for j in range(k, -1, -1):
                shifted[j] += c * binom * powers[k - j]
                binom = binom * j // (k - j + 1) if j else binom
        scalar = _e(self.alpha * t * t + self.beta * t)
        poly = tuple(scalar * c for c in shifted)
        return GaussianAtom(poly, self.alpha, self.beta + (self.alpha + self.alpha) * t)

    def modulate(self, s) -> "GaussianAtom":
        """Multiply by e(s*x)."""
        return GaussianAtom(self.poly, self.alpha, self.beta + s)

    def times_x(self) -> "GaussianAtom":
        return GaussianAtom((0j,) + self.poly, self.alpha, self.beta)

    def derivative(self) -> "GaussianAtom":
        """d/dx: p' + 2*pi*i*(2*alpha*x + beta)*p, done on coefficients."""
        ta = _TWO_PI_I * (self.alpha + self.alpha)
        tb = _TWO_PI_I * self.beta
        p = self.poly
        out = [0j] * (len(p) + 1)
        for j in range(len(p) + 1):
            acc = 0j
            if j + 1 < len(p) + 1 and j + 1 <= len(p) - 1:
                acc += (j + 1) * p[j + 1]
            if j < len(p):
                acc += tb * p[j]
            if j >= 1:
                acc += ta * p[j - 1]
            out[j] = acc
        return GaussianAtom(tuple(out), self.alpha, self.beta)

    def __eq__(self, other):
        if not isinstance(other, GaussianAtom):
            return NotImplemented
        return (self.poly, self.alpha, self.beta) == (other.poly, other.alpha, other.beta)

    def __hash__(self):
        return hash((self.poly, self.alpha, self.beta))

    def __repr__(self):
        return f"GaussianAtom(poly={self.poly}, alpha={self.alpha}, beta={self.beta})"

    def to_json_dict(self) -> dict:
        return {
            "poly": [[c.real, c.imag] for c in self.poly],
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GaussianAtom":
        return cls(
            [complex(re, im) for re, im in d["poly"]],
            complex(*d["alpha"]),
            complex(*d["beta"]),
        )


class SchwartzVector:
    """Finite sum of Gaussian atoms; the concrete model of a Schwartz vector."""

    __slots__ = ("atoms",)

    def __init__(self, atoms=()):
        merged: dict[tuple[complex, complex], list] = {}
        for at in atoms:
            key = (at.alpha, at.beta)
            if key in merged:
                cur = merged[key]
                n = max(len(cur), len(at.poly))
                cur.extend([0j] * (n - len(cur)))
                for k, c in enumerate(at.poly):
                    cur[k] += c
            else:
                merged[key] = list(at.poly)
        out = []
        for (alpha, beta), poly in merged.items():
            at = GaussianAtom(poly, alpha, beta)
            if not at.is_zero():
                out.append(at)
        object.__setattr__(self, "atoms", tuple(out))

    def __setattr__(self, *a):
        raise AttributeError("SchwartzVector is immutable")

    @classmethod
    def of(cls, *atoms) -> "SchwartzVector":
        return cls(atoms)

    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def max_degree(self) -> int:
        return max((a.degree for a in self.atoms), default=0)

    def map_atoms(self, f) -> "SchwartzVector":
        return SchwartzVector(f(a) for a in self.atoms)

    def __add__(self, other):
        return SchwartzVector(self.atoms + other.atoms)

    def __sub__(self, other):
        return SchwartzVector(self.atoms + tuple(a.scaled(-1.0) for a in other.atoms))

    def scaled(self, z) -> "SchwartzVector":
        return self.map_atoms(lambda a: a.scaled(z))

    def translate(self, t) -> "SchwartzVector":
        return self.map_atoms(lambda a: a.translate(t))

    def modulate(self, s) -> "SchwartzVector":
        return self.map_atoms(lambda a: a.modulate(s))

    def times_x(self) -> "SchwartzVector":
        return self.map_atoms(lambda a: a.times_x())

    def derivative(self) -> "SchwartzVector":
        return self.map_atoms(lambda a: a.derivative())

    def eval(self, x):
        if not self.atoms:
            return np.zeros_like(np.asarray(x, dtype=complex))
        return sum(a.value(x) for a in self.atoms)

    @staticmethod
    def _atom_key(a: GaussianAtom):
        return (a.alpha.real, a.alpha.imag, a.beta.real, a.beta.imag)

    def __eq__(self, other):
        if not isinstance(other, SchwartzVector):
            return NotImplemented
        return sorted(self.atoms, key=self._atom_key) == sorted(other.atoms, key=self._atom_key)

    def __hash__(self):
        return hash(tuple(sorted(self.atoms, key=self._atom_key)))

    def __repr__(self):
        return f"SchwartzVector({len(self.atoms)} atoms, degree {self.max_degree})"

    def to_json_dict(self) -> list:
        return [a.to_json_dict() for a in self.atoms]

    @classmethod
    def from_json_dict(cls, lst) -> "SchwartzVector":
        return cls(GaussianAtom.from_json_dict(d) for d in lst)


class FiniteVector:
    """Vector in C(Z/cZ)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        object.__setattr__(self, "entries", tuple(complex(e) for e in entries))
        if not self.entries:
            raise ValueError("modulus must be positive")

    def __setattr__(self, *a):
        raise AttributeError("FiniteVector is immutable")

    @classmethod
    def delta(cls, c: int, k: int) -> "FiniteVector":
        return cls([1.0 if n == k % c else 0.0 for n in range(c)])

    @property
    def c(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int) -> complex:
        return self.entries[n % self.c]

    def shift(self, s: int) -> "FiniteVector":
        """(shifted)[n] = self[n + s]."""
        return FiniteVector([self[(n + s)] for n in range(self.c)])

    def phased(self, turns_of_index) -> "FiniteVector":
        """Multiply entry n by exp(2*pi*i*turns_of_index(n))."""
        return FiniteVector([cis_turns(turns_of_index(n)) * e for n, e in enumerate(self.entries)])

    def __add__(self, other):
        if other.c != self.c:
            raise ValueError("mismatched moduli")
        return FiniteVector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        if other.c != self.c:
            raise ValueError("mismatched moduli")
        return FiniteVector([a - b for a, b in zip(self.entries, other.entries)])

    def scaled(self, z) -> "FiniteVector":
        return FiniteVector([z * e for e in self.entries])

    def norm(self) -> float:
        return math.sqrt(sum(abs(e) ** 2 for e in self.entries))

    def __eq__(self, other):
        if not isinstance(other, FiniteVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"FiniteVector({list(self.entries)!r})"

    def to_json_dict(self) -> list:
        return [[e.real, e.imag] for e in self.entries]

    @classmethod
    def from_json_dict(cls, lst) -> "FiniteVector":
        return cls([complex(re, im) for re, im in lst])


# -- group elements ----------------------------------------------------------


@dataclass(frozen=True)
class HeisElement:
    """Element (lam, y) of the real Heisenberg group; |lam| = 1."""

    lam: complex
    y: tuple[float, float]

    def __post_init__(self):
        if abs(abs(self.lam) - 1.0) > 1e-12:
            raise ValueError("central element must have modulus 1")
        object.__setattr__(self, "y", (float(self.y[0]), float(self.y[1])))


@dataclass(frozen=True)
class FiniteHeisElement:
    """Element of Heis((Z/cZ)^2): exact central phase in turns and a pair mod c.

    The cocycle denominator is 2c, so the operator attached to (turns, m)
    only depends on m mod 2c; reducing a lift into [0, c)^2 therefore costs a
    half-integer central correction, which canonicalization folds into turns.
    That keeps one representative per operator and makes the representation
    property an identity of exact rationals.
    """

    turns: Fraction
    m: tuple[int, int]
    c: int

    def __post_init__(self):
        c = self.c
        k1, r1 = divmod(self.m[0], c)
        k2, r2 = divmod(self.m[1], c)
        corr = Fraction(k1 * r2 + k2 * r1 + c * k1 * k2, 2)
        object.__setattr__(self, "turns", (Fraction(self.turns) + corr) % 1)
        object.__setattr__(self, "m", (r1, r2))

    @property
    def lam(self) -> complex:
        return cis_turns(self.turns)


class RealHeisenberg:
    """Heisenberg group over R^2 with cocycle e((x1*y2 - y1*x2)/(2*eps))."""

    def __init__(self, eps: float):
        if not eps > 0:
            raise ValueError("eps must be positive")
        self.eps = float(eps)

    def element(self, lam: complex, y1: float, y2: float) -> HeisElement:
        return HeisElement(complex(lam), (y1, y2))

    def cocycle(self, x, y) -> complex:
        return _e((x[0] * y[1] - y[0] * x[1]) / (2.0 * self.eps))

    def pairing(self, x, y) -> complex:
        """psi(x,y)/psi(y,x) = e((x1*y2 - y1*x2)/eps)."""
        return _e((x[0] * y[1] - y[0] * x[1]) / self.eps)

    def mul(self, h1: HeisElement, h2: HeisElement) -> HeisElement:
        lam = h1.lam * h2.lam * self.cocycle(h1.y, h2.y)
        return HeisElement(lam, (h1.y[0] + h2.y[0], h1.y[1] + h2.y[1]))

    def inverse(self, h: HeisElement) -> HeisElement:
        return HeisElement(h.lam.conjugate(), (-h.y[0], -h.y[1]))

    def act(self, h: HeisElement, f: SchwartzVector) -> SchwartzVector:
        """U_{(lam,y)} f(x) = lam * e((x*y2 + y1*y2/2)/eps) * f(x + y1)."""
        y1, y2 = h.y
        scalar = h.lam * _e(y1 * y2 / (2.0 * self.eps))
        return f.translate(y1).modulate(y2 / self.eps).scaled(scalar)


class FiniteHeisenberg:
    """Heisenberg group over (Z/cZ)^2 with exact rational phases."""

    def __init__(self, c: int):
        if c < 1:
            raise ValueError("modulus must be >= 1")
        self.c = int(c)

    def element(self, turns, m1: int, m2: int) -> FiniteHeisElement:
        return FiniteHeisElement(Fraction(turns), (m1, m2), self.c)

    def cocycle_turns(self, x, y) -> Fraction:
        return Fraction(x[0] * y[1] - y[0] * x[1], 2 * self.c) % 1

    def pairing_turns(self, x, y) -> Fraction:
        return Fraction(x[0] * y[1] - y[0] * x[1], self.c) % 1

    def mul(self, h1: FiniteHeisElement, h2: FiniteHeisElement) -> FiniteHeisElement:
        turns = h1.turns + h2.turns + self.cocycle_turns(h1.m, h2.m)
        return self.element(turns, h1.m[0] + h2.m[0], h1.m[1] + h2.m[1])

    def inverse(self, h: FiniteHeisElement) -> FiniteHeisElement:
        return self.element(-h.turns, -h.m[0], -h.m[1])

    def act_basis(self, h: FiniteHeisElement, k: int) -> tuple[Fraction, int]:
        """Exact action on a basis delta: U delta_k = e(turns) * delta_index."""
        m1, m2 = h.m
        n = (k - m1) % self.c
        turns = (h.turns + Fraction(2 * n * m2 + m1 * m2, 2 * self.c)) % 1
        return turns, n

    def act(self, h: FiniteHeisElement, phi: FiniteVector) -> FiniteVector:
        """(U phi)[n] = lam * e((n*m2 + m1*m2/2)/c) * phi[n + m1]."""
        if phi.c != self.c:
            raise ValueError("vector modulus does not match the group")
        m1, m2 = h.m
        out = []
        for n in range(self.c):
            turns = (h.turns + Fraction(2 * n * m2 + m1 * m2, 2 * self.c)) % 1
            out.append(cis_turns(turns) * phi[n + m1])
        return FiniteVector(out)

    def subgroup(self, generators) -> set[tuple[int, int]]:
        elems = {(0, 0)}
        frontier = [(g[0] % self.c, g[1] % self.c) for g in generators]
        while frontier:
            x = frontier.pop()
            if x in elems:
                continue
            elems.add(x)
            for y in list(elems):
                z = ((x[0] + y[0]) % self.c, (x[1] + y[1]) % self.c)
                if z not in elems:
                    frontier.append(z)
        return elems

    def perp(self, subgroup: set[tuple[int, int]]) -> set[tuple[int, int]]:
        out = set()
        for x1 in range(self.c):
            for x2 in range(self.c):
                if all((x1 * y2 - y1 * x2) % self.c == 0 for (y1, y2) in subgroup):
                    out.add((x1, x2))
        return out

    def isotropic_check(self, generators) -> str:
        """Classify the subgroup generated by ``generators`` under the pairing.

        Returns "maximal_isotropic", "isotropic" or "neither".
        """
        H = self.subgroup(generators)
        Hperp = self.perp(H)
        if H <= Hperp:
            return "maximal_isotropic" if H == Hperp else "isotropic"
        return "neither"

    def pairing_nondegenerate(self) -> bool:
        """Exhaustive check that x -> e(x, .) has trivial kernel."""
        for x1 in range(self.c):
            for x2 in range(self.c):
                if (x1, x2) == (0, 0):
                    continue
                if all(
                    (x1 * y2 - y1 * x2) % self.c == 0
                    for y1 in range(self.c)
                    for y2 in range(self.c)
                ):
                    return False
        return True


# -- free-function entry points ------------------------------------------------


def group_mul(group, h1, h2):
    return group.mul(h1, h2)


def act_real(group: RealHeisenberg, h: HeisElement, f: SchwartzVector) -> SchwartzVector:
    return group.act(h, f)


def act_finite(group: FiniteHeisenberg, h: FiniteHeisElement, phi: FiniteVector) -> FiniteVector:
    return group.act(h, phi)


def isotropic_check(group: FiniteHeisenberg, generators) -> str:
    return group.isotropic_check(generators)


def lie_derivative(f: SchwartzVector, which: str, eps: float) -> SchwartzVector:
    """Derivative of the real representation along the standard Lie basis.

    "A" is d/dx, "B" is multiplication by 2*pi*i*x/eps, "C" (the central
    direction) is multiplication by 2*pi*i.  [A, B] = (1/eps) C.
    """
    if which == "A":
        return f.derivative()
    if which == "B":
        return f.times_x().scaled(_TWO_PI_I / eps)
    if which == "C":
        return f.scaled(_TWO_PI_I)
    raise ValueError(f"unknown Lie direction {which!r}")


def holomorphic_vector(tau: complex, eps: float) -> SchwartzVector:
    """f_tau(x) = e(tau*x^2/(2*eps)); requires Im(tau) > 0 and eps > 0."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return SchwartzVector.of(GaussianAtom((1.0,), tau / (2.0 * eps), 0.0))


def holomorphic_residual(tau: complex, f: SchwartzVector, eps: float) -> SchwartzVector:
    """(delta_A - tau*delta_B) f computed atomically.

    For each atom the result is p' + 2*pi*i*((2*alpha - tau/eps)*x + beta)*p;
    the coefficient 2*alpha - tau/eps is an exact floating zero when alpha was
    built as tau/(2*eps), since halving and doubling are exact in IEEE
    arithmetic, so holomorphic atoms are annihilated exactly.
    """
    out = []
    for at in f.atoms:
        gcoef = _TWO_PI_I * ((at.alpha + at.alpha) - tau / eps)
        tb = _TWO_PI_I * at.beta
        p = at.poly
        res = [0j] * (len(p) + 1)
        for j in range(len(p) + 1):
            acc = 0j
            if j + 1 <= len(p) - 1:
                acc += (j + 1) * p[j + 1]
            if j < len(p):
                acc += tb * p[j]
            if j >= 1:
                acc += gcoef * p[j - 1]
            res[j] = acc
        out.append(GaussianAtom(tuple(res), at.alpha, at.beta))
    return SchwartzVector(out)


def eval_vector(f: SchwartzVector, x):
    return f.eval(x)
