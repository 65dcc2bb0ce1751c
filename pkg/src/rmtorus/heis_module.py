"""Heisenberg bimodules over the smooth torus algebra and their tensor products.

E = S(R) (x) C(Z/cZ) carries commuting left and right actions of the torus
algebra with the same parameter theta, built from eight elementary operators.
With eps = (c*theta + d)/c the degree-n module uses the entries of g^n.  The
right action of the generators sends f (x) phi to

    (U) f(x - eps) (x) phi([k-1])        (V) e(x) f (x) e(-d*k/c) phi([k])

and the left action to

    (U) f(x - 1/c) (x) phi([k-a])        (V) e(x/(c*eps)) f (x) e(-k/c) phi([k])

with e(z) = exp(2*pi*i*z).  Monomials U^n V^m act on the right by applying U
n times then V m times (xi.(ab) = (xi.a).b fixes all other compositions), and
on the left by applying V m times then U n times.

The balanced product E_{g^m} (x)_{A_theta} E_{g^n} -> E_{g^{m+n}} is realized
by averaging a plain tensor over the relation group generated by
W = (right action on the first factor) o (left action on the second)^{-1},
which makes the two-variable function descend to the quotient.  The invariant
functions are recovered along an affine section: writing N = m + n and
abbreviating the degree-k constants (a_k, c_k, d_k, eps_k), the value of the
product at (u, [j]) with u real and j mod c_N is the convergent series

    H(u, j) = sum_s  xi_S(x - s*eps_m) * xi_F[-s mod c_m]
                    * eta_S(y + s/c_n) * eta_F[(j + s*a_n) mod c_n]

with x = (u - j*eps_N)/(c_n*eps_n) and y = (u - j*eps_N) + j*eps_n.  One
checks directly from the operator table (using a_N = a_m*a_n + b_m*c_n,
c_m*eps_m*c_n*eps_n = c_N*eps_N and eps_n - eps_N = c_m/(c_n*c_N)) that H is
well defined in j mod c_N, balanced in the algebra action, and intertwines
the degree-N operator table on (u, j).  H is then sampled on a deterministic
grid and expanded in the Gaussian-atom basis inherited from the factors by a
least-squares solve whose residual is reported; for matched holomorphic
factors (alpha_i = tau/(2*eps_i)) the s-dependence of the u-linear phase
cancels and the series collapses onto a single atom per j, which
matched_product computes directly as a certified theta-like sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .heis_rep import FiniteVector, GaussianAtom, SchwartzVector
from .qfield import QuadIrr, RMData, rank_value
from .torus_alg import TorusElement

_TWO_PI_I = 2j * math.pi

_COND_LIMIT = 1e12


class IllConditionedSolve(RuntimeError):
    """Basis expansion rejected; .report carries the grid and condition data."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


class ModuleElement:
    """Element of E_{g^n}: a finite sum of (Schwartz atom sum) (x) (finite vector)."""

    __slots__ = ("data", "degree", "terms")

    def __init__(self, data: RMData, degree: int, terms):
        if degree < 1:
            raise ValueError("module degree must be >= 1")
        consts = data.power(degree)
        terms = tuple((s, f) for s, f in terms)
        for _, f in terms:
            if f.c != consts.c:
                raise ValueError(f"finite factor has modulus {f.c}, expected {consts.c}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, *a):
        raise AttributeError("ModuleElement is immutable")

    @property
    def consts(self):
        return self.data.power(self.degree)

    @classmethod
    def single(cls, data: RMData, degree: int, f: SchwartzVector, phi: FiniteVector) -> "ModuleElement":
        return cls(data, degree, [(f, phi)])

    def is_zero_form(self) -> bool:
        return all(s.is_zero() for s, _ in self.terms)

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        if other.degree != self.degree:
            raise ValueError("cannot add elements of different degrees")
        return ModuleElement(self.data, self.degree, self.terms + other.terms)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + other.scaled(-1.0)

    def scaled(self, z) -> "ModuleElement":
        return ModuleElement(self.data, self.degree, [(s.scaled(z), f) for s, f in self.terms])

    def map_schwartz(self, op) -> "ModuleElement":
        return ModuleElement(self.data, self.degree, [(op(s), f) for s, f in self.terms])

    def collect(self) -> "ModuleElement":
        """Merge terms whose finite factors agree exactly."""
        order: list[tuple[complex, ...]] = []
        groups: dict[tuple[complex, ...], SchwartzVector] = {}
        for s, f in self.terms:
            key = f.entries
            if key in groups:
                groups[key] = groups[key] + s
            else:
                groups[key] = s
                order.append(key)
        terms = [(groups[k], FiniteVector(k)) for k in order if not groups[k].is_zero()]
        return ModuleElement(self.data, self.degree, terms)

    def eval(self, x, k: int):
        c = self.consts.c
        total = 0
        for s, f in self.terms:
            w = f[k % c]
            if w != 0:
                total = total + w * s.eval(x)
        return total

    def sample(self, xs) -> np.ndarray:
        """Array of shape (c_n, len(xs)), row k = values at (xs, [k])."""
        xs = np.asarray(xs, dtype=float)
        c = self.consts.c
        out = np.zeros((c, xs.size), dtype=complex)
        for s, f in self.terms:
            vals = s.eval(xs)
            for k in range(c):
                w = f[k]
                if w != 0:
                    out[k] += w * vals
        return out

    def sup_distance(self, other: "ModuleElement", xs) -> float:
        return float(np.max(np.abs(self.sample(xs) - other.sample(xs))))

    def sup_norm(self, xs) -> float:
        return float(np.max(np.abs(self.sample(xs))))

    def __repr__(self):
        return f"ModuleElement(degree={self.degree}, c={self.consts.c}, {len(self.terms)} terms)"

    def to_json_dict(self) -> dict:
        return {
            "theta": self.data.theta.to_json_dict(),
            "g": self.data.g.to_list(),
            "degree": self.degree,
            "terms": [
                {"schwartz": s.to_json_dict(), "finite": f.to_json_dict()}
                for s, f in self.terms
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModuleElement":
        from .qfield import SL2Matrix

        data = RMData(QuadIrr.from_json_dict(d["theta"]), SL2Matrix.from_list(d["g"]))
        terms = [
            (SchwartzVector.from_json_dict(t["schwartz"]), FiniteVector.from_json_dict(t["finite"]))
            for t in d["terms"]
        ]
        return cls(data, d["degree"], terms)


# -- generator actions --------------------------------------------------------


def _apply_right_gen(elem: ModuleElement, gen: str) -> ModuleElement:
    k = elem.consts
    c, d, eps = k.c, k.d, k.eps
    if gen == "U":
        return ModuleElement(elem.data, elem.degree,
                             [(s.translate(-eps), f.shift(-1)) for s, f in elem.terms])
    if gen == "Uinv":
        return ModuleElement(elem.data, elem.degree,
                             [(s.translate(eps), f.shift(1)) for s, f in elem.terms])
    if gen == "V":
        return ModuleElement(elem.data, elem.degree,
                             [(s.modulate(1.0), f.phased(lambda n: Fraction(-d * n, c)))
                              for s, f in elem.terms])
    if gen == "Vinv":
        return ModuleElement(elem.data, elem.degree,
                             [(s.modulate(-1.0), f.phased(lambda n: Fraction(d * n, c)))
                              for s, f in elem.terms])
    raise ValueError(f"unknown generator {gen!r}")


def _apply_left_gen(elem: ModuleElement, gen: str) -> ModuleElement:
    k = elem.consts
    c, a, eps = k.c, k.a, k.eps
    if gen == "U":
        return ModuleElement(elem.data, elem.degree,
                             [(s.translate(-1.0 / c), f.shift(-a)) for s, f in elem.terms])
    if gen == "Uinv":
        return ModuleElement(elem.data, elem.degree,
                             [(s.translate(1.0 / c), f.shift(a)) for s, f in elem.terms])
    if gen == "V":
        return ModuleElement(elem.data, elem.degree,
                             [(s.modulate(1.0 / (c * eps)), f.phased(lambda n: Fraction(-n, c)))
                              for s, f in elem.terms])
    if gen == "Vinv":
        return ModuleElement(elem.data, elem.degree,
                             [(s.modulate(-1.0 / (c * eps)), f.phased(lambda n: Fraction(n, c)))
                              for s, f in elem.terms])
    raise ValueError(f"unknown generator {gen!r}")


def right_act(a, xi: ModuleElement) -> ModuleElement:
    """xi . a.  Strings name generators; a TorusElement acts monomial by monomial.

    A monomial U^n V^m acts as n right-U steps followed by m right-V steps,
    so that xi.(ab) = (xi.a).b holds for the algebra product.
    """
    if isinstance(a, str):
        return _apply_right_gen(xi, a)
    if not isinstance(a, TorusElement):
        raise TypeError("right_act expects a generator name or a TorusElement")
    out = None
    for (n, m), coef in a.coeffs.items():
        term = xi
        for _ in range(abs(n)):
            term = _apply_right_gen(term, "U" if n > 0 else "Uinv")
        for _ in range(abs(m)):
            term = _apply_right_gen(term, "V" if m > 0 else "Vinv")
        term = term.scaled(coef)
        out = term if out is None else out + term
    if out is None:
        out = ModuleElement(xi.data, xi.degree, [])
    return out


def left_act(a, xi: ModuleElement) -> ModuleElement:
    """a . xi.  A monomial U^n V^m acts as m left-V steps then n left-U steps,
    so that (ab).xi = a.(b.xi)."""
    if isinstance(a, str):
        return _apply_left_gen(xi, a)
    if not isinstance(a, TorusElement):
        raise TypeError("left_act expects a generator name or a TorusElement")
    out = None
    for (n, m), coef in a.coeffs.items():
        term = xi
        for _ in range(abs(m)):
            term = _apply_left_gen(term, "V" if m > 0 else "Vinv")
        for _ in range(abs(n)):
            term = _apply_left_gen(term, "U" if n > 0 else "Uinv")
        term = term.scaled(coef)
        out = term if out is None else out + term
    if out is None:
        out = ModuleElement(xi.data, xi.degree, [])
    return out


# -- connections ---------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionValue:
    direction: int
    result: ModuleElement


def connection(i: int, xi: ModuleElement) -> ModuleElement:
    """nabla_1 = multiplication by 2*pi*i*x/eps_n, nabla_2 = d/dx."""
    eps = xi.consts.eps
    if i == 1:
        return xi.map_schwartz(lambda s: s.times_x().scaled(_TWO_PI_I / eps))
    if i == 2:
        return xi.map_schwartz(lambda s: s.derivative())
    raise ValueError("connection direction must be 1 or 2")


def curvature(xi: ModuleElement) -> ModuleElement:
    """[nabla_1, nabla_2] xi; equals -(2*pi*i/eps_n) xi exactly on atoms."""
    return (connection(1, connection(2, xi)) - connection(2, connection(1, xi))).collect()


def curvature_scalar(data: RMData, degree: int) -> complex:
    return -_TWO_PI_I / data.power(degree).eps


def rank(data: RMData, degree: int) -> QuadIrr:
    return rank_value(data.g, degree, data.theta)


def holomorphic_element(data: RMData, degree: int, tau: complex, k: int = 0,
                        weights: FiniteVector | None = None) -> ModuleElement:
    """f_{tau,n} (x) phi with phi = delta_k by default."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    consts = data.power(degree)
    atom = GaussianAtom((1.0,), tau / (2.0 * consts.eps), 0.0)
    phi = weights if weights is not None else FiniteVector.delta(consts.c, k)
    return ModuleElement.single(data, degree, SchwartzVector.of(atom), phi)


# -- balanced product ----------------------------------------------------------


def _atom_center(at: GaussianAtom) -> float:
    # where |e(alpha w^2 + beta w)| peaks
    return -at.beta.imag / (2.0 * at.alpha.imag)


def _pair_columns(xi: ModuleElement, eta: ModuleElement):
    """Target-basis data for every atom pair: (alpha_N, beta_N, max poly degree)."""
    cn = eta.consts.c
    pn = 1.0 / (cn * eta.consts.eps)
    cols: dict[tuple[complex, complex], int] = {}
    for s1, _ in xi.terms:
        for a1 in s1.atoms:
            for s2, _ in eta.terms:
                for a2 in s2.atoms:
                    alpha = a1.alpha * pn * pn + a2.alpha
                    beta = a1.beta * pn + a2.beta
                    deg = a1.degree + a2.degree
                    key = (alpha, beta)
                    cols[key] = max(cols.get(key, 0), deg)
    return cols


def balanced_product(xi: ModuleElement, eta: ModuleElement, *, tol: float = 1e-9):
    """Image of xi (x) eta in E_{g^{m+n}} plus a residual report.

    Averages the plain tensor over the relation group, samples the result on
    the affine section described in the module docstring, and expands in the
    Gaussian-atom basis inherited from the factors by least squares.  Returns
    (ModuleElement of degree m+n, report dict); raises IllConditionedSolve
    when the expansion matrix has condition number above 1e12.
    """
    if xi.data != eta.data:
        raise ValueError("factors must share the same RMData")
    data = xi.data
    m, n = xi.degree, eta.degree
    N = m + n
    km, kn, kN = data.power(m), data.power(n), data.power(N)
    cm, cn, cN = km.c, kn.c, kN.c
    an = kn.a
    eps_m, eps_n, eps_N = km.eps, kn.eps, kN.eps

    cols = _pair_columns(xi, eta)
    if not cols:
        return ModuleElement(data, N, []), {"max_residual": 0.0, "max_cond": 1.0,
                                            "grid_points": 0, "grid_halfwidth": 0.0,
                                            "columns": 0, "s_terms": 0}

    # grid: +-4 standard deviations of the widest target Gaussian, density
    # scaled with the output modulus so solves stay overdetermined
    min_im = min(alpha.imag for alpha, _ in cols)
    if min_im <= 0:
        raise ValueError("target atoms must decay (Im alpha_N > 0)")
    sigma = 1.0 / (2.0 * math.sqrt(math.pi * min_im))
    max_deg = max(cols.values())
    halfwidth = 4.0 * sigma * (1.0 + 0.15 * max_deg)
    points = max(4 * cN, 48, 8 * sum(d + 1 for d in cols.values()))
    us = np.linspace(-halfwidth, halfwidth, points)

    # truncation radius: Gaussian tail of the averaging series below 1e-3*tol
    q = min(min(a1.alpha.imag * eps_m * eps_m for s1, _ in xi.terms for a1 in s1.atoms),
            min(a2.alpha.imag / (cn * cn) for s2, _ in eta.terms for a2 in s2.atoms))
    radius = math.sqrt(max(math.log(1.0 / (1e-3 * tol)), 1.0) / (2.0 * math.pi * q))
    radius = int(math.ceil(radius)) + 2 + 2 * max_deg

    pn = 1.0 / (cn * eps_n)
    basis_keys = sorted(cols.keys(), key=lambda ab: (ab[0].real, ab[0].imag, ab[1].real, ab[1].imag))
    col_index: list[tuple[complex, complex, int]] = []
    for alpha, beta in basis_keys:
        for p in range(cols[(alpha, beta)] + 1):
            col_index.append((alpha, beta, p))
    B = np.empty((points, len(col_index)), dtype=complex)
    for idx, (alpha, beta, p) in enumerate(col_index):
        B[:, idx] = us ** p * np.exp(_TWO_PI_I * (alpha * us ** 2 + beta * us))
    cond = float(np.linalg.cond(B))
    report: dict = {
        "grid_points": points,
        "grid_halfwidth": halfwidth,
        "columns": len(col_index),
        "cond": cond,
        "truncation_radius": radius,
        "per_j_residual": [],
    }
    if cond > _COND_LIMIT:
        raise IllConditionedSolve(
            f"expansion basis condition number {cond:.3e} exceeds {_COND_LIMIT:.1e}", report)

    out_terms = []
    s_terms_max = 0
    for j in range(cN):
        x0 = -j * eps_N * pn
        y0 = j * (eps_n - eps_N)
        h = np.zeros(points, dtype=complex)
        for s1, f1 in xi.terms:
            for s2, f2 in eta.terms:
                if s1.is_zero() or s2.is_zero():
                    continue
                centers = []
                for a1 in s1.atoms:
                    w0 = _atom_center(a1)
                    centers += [(x0 - w0 - pn * halfwidth) / eps_m,
                                (x0 - w0 + pn * halfwidth) / eps_m]
                for a2 in s2.atoms:
                    w0 = _atom_center(a2)
                    centers += [cn * (w0 - y0 - halfwidth), cn * (w0 - y0 + halfwidth)]
                s_lo = int(math.floor(min(centers))) - radius
                s_hi = int(math.ceil(max(centers))) + radius
                s_terms_max = max(s_terms_max, s_hi - s_lo + 1)
                for s in range(s_lo, s_hi + 1):
                    w = f1[(-s) % cm] * f2[(j + s * an) % cn]
                    if w == 0:
                        continue
                    h += w * s1.eval(pn * us + x0 - s * eps_m) * s2.eval(us + y0 + s / cn)
        coef, *_ = np.linalg.lstsq(B, h, rcond=None)
        hn = float(np.linalg.norm(h))
        res = float(np.linalg.norm(B @ coef - h)) / max(hn, 1e-300) if hn > 0 else 0.0
        report["per_j_residual"].append(res)
        atoms = []
        for (alpha, beta), _deg in cols.items():
            poly = [0j] * (cols[(alpha, beta)] + 1)
            hit = False
            for idx, (al, be, p) in enumerate(col_index):
                if al == alpha and be == beta and coef[idx] != 0:
                    poly[p] = coef[idx]
                    hit = True
            if hit:
                atoms.append(GaussianAtom(tuple(poly), alpha, beta))
        sv = SchwartzVector(atoms)
        if not sv.is_zero():
            out_terms.append((sv, FiniteVector.delta(cN, j)))
    report["s_terms"] = s_terms_max
    report["max_residual"] = max(report["per_j_residual"], default=0.0)
    report["max_cond"] = cond
    return ModuleElement(data, N, out_terms), report


def matched_product(xi: ModuleElement, eta: ModuleElement, *, tol: float = 1e-14):
    """Closed-form balanced product for matched degree-0 Gaussian factors.

    Requires every atom to satisfy alpha_1 * eps_m = alpha_2 * eps_n (both
    equal tau/2 for holomorphic vectors), in which case the averaging series
    collapses, for each output index j, onto a single atom whose coefficient
    is a convergent theta-like sum evaluated here term by term.  Serves as an
    independent route against the grid/least-squares expansion.
    """
    if xi.data != eta.data:
        raise ValueError("factors must share the same RMData")
    data = xi.data
    m, n = xi.degree, eta.degree
    N = m + n
    km, kn, kN = data.power(m), data.power(n), data.power(N)
    cm, cn, cN = km.c, kn.c, kN.c
    an = kn.a
    eps_m, eps_n, eps_N = km.eps, kn.eps, kN.eps
    pn = 1.0 / (cn * eps_n)

    for sv, _ in xi.terms + eta.terms:
        for at in sv.atoms:
            if at.degree > 0:
                raise ValueError("matched_product handles degree-0 atoms only")
    for s1, _ in xi.terms:
        for a1 in s1.atoms:
            for s2, _ in eta.terms:
                for a2 in s2.atoms:
                    mism = abs(a1.alpha * eps_m - a2.alpha * eps_n)
                    if mism > 1e-9 * max(abs(a1.alpha * eps_m), 1.0):
                        raise ValueError("atoms are not matched; use balanced_product")

    out_terms = []
    for j in range(cN):
        x0 = -j * eps_N * pn
        y0 = j * (eps_n - eps_N)
        atoms: dict[tuple[complex, complex], complex] = {}
        for s1, f1 in xi.terms:
            for s2, f2 in eta.terms:
                for a1 in s1.atoms:
                    for a2 in s2.atoms:
                        w1 = a1.poly[0]
                        w2 = a2.poly[0]
                        alpha = a1.alpha * pn * pn + a2.alpha
                        beta = (a1.beta * pn + a2.beta
                                + 2 * a1.alpha * pn * x0 + 2 * a2.alpha * y0)
                        # minimize Im of the constant exponent over s
                        b2 = a1.alpha.imag * eps_m * eps_m + a2.alpha.imag / (cn * cn)
                        b1 = (-2 * a1.alpha.imag * eps_m * x0 - a1.beta.imag * eps_m
                              + 2 * a2.alpha.imag * y0 / cn + a2.beta.imag / cn)
                        s_star = int(round(-b1 / (2 * b2)))
                        # beyond |s - s_star| = R the summand is below tol
                        # relative to the peak by the Gaussian envelope
                        R = int(math.ceil(math.sqrt(
                            max(math.log(1.0 / tol), 1.0) / (2.0 * math.pi * b2)
                        ))) + cm * cn + 2
                        total = 0j
                        for s in range(s_star - R, s_star + R + 1):
                            wf = f1[(-s) % cm] * f2[(j + s * an) % cn]
                            if wf == 0:
                                continue
                            xs = x0 - s * eps_m
                            ys = y0 + s / cn
                            const = (a1.alpha * xs * xs + a1.beta * xs
                                     + a2.alpha * ys * ys + a2.beta * ys)
                            total += wf * np.exp(_TWO_PI_I * const)
                        coef = w1 * w2 * total
                        if coef != 0:
                            key = (alpha, beta)
                            atoms[key] = atoms.get(key, 0j) + coef
        sv = SchwartzVector(GaussianAtom((z,), alpha, beta) for (alpha, beta), z in atoms.items())
        if not sv.is_zero():
            out_terms.append((sv, FiniteVector.delta(cN, j)))
    return ModuleElement(data, N, out_terms)


# -- relation diagnostics ------------------------------------------------------


def module_residuals(data: RMData, degree: int, tau: complex = 0.3 + 1.1j, xs=None) -> dict:
    """Named sup-norm residuals of the bimodule relations on a probe vector."""
    from .qfield import unit_phase

    if xs is None:
        xs = np.linspace(-6.0, 6.0, 61)
    c = data.power(degree).c
    probe = holomorphic_element(data, degree, tau,
                                weights=FiniteVector([1.0 + 0.0j] * c))
    eth = unit_phase(data.theta)

    def dist(p, q):
        return p.sup_distance(q, xs) / max(p.sup_norm(xs), 1e-300)

    uv = right_act("V", right_act("U", probe))
    vu = right_act("U", right_act("V", probe))
    right_rel = dist(uv, vu.scaled(eth))

    luv = left_act("U", left_act("V", probe))
    lvu = left_act("V", left_act("U", probe))
    left_rel = dist(luv, lvu.scaled(eth))

    bimod = max(
        dist(left_act(a, right_act(b, probe)), right_act(b, left_act(a, probe)))
        for a in ("U", "V")
        for b in ("U", "V")
    )

    # Leibniz: nabla_1 pairs with delta_1 (2*pi*i on U), nabla_2 with delta_2
    lhs1 = connection(1, right_act("U", probe))
    rhs1 = right_act("U", connection(1, probe)) + right_act("U", probe).scaled(_TWO_PI_I)
    lhs2 = connection(2, right_act("V", probe))
    rhs2 = right_act("V", connection(2, probe)) + right_act("V", probe).scaled(_TWO_PI_I)
    leib = max(dist(lhs1, rhs1), dist(lhs2, rhs2))

    curv = dist(curvature(probe), probe.scaled(curvature_scalar(data, degree)))

    return {
        "degree": degree,
        "right_relation": right_rel,
        "left_relation": left_rel,
        "bimodule_commutation": bimod,
        "leibniz": leib,
        "curvature": curv,
    }
