"""Graded coordinate ring of a real-multiplication torus with complex parameter tau.

B = C.1 (+) R_1 (+) R_2 (+) ... where the degree-n piece is spanned by
f_{tau,n} (x) delta_j for j mod c_n, f_{tau,n} the holomorphic Gaussian of the
degree-n module.  Multiplication is the balanced product of heis_module,
re-expanded in the holomorphic basis by an L2 projection on the sampling
grid; every product carries a closure residual that the reports surface.

The degree-0 piece is a formal unit line: the matrix power g^0 has c_0 = 0 and
no module realizes it, so scalars act by plain rescaling.

check_generation and check_quadratic implement the two desk-checkable ring
conditions: surjectivity of R_1 (x) R_n -> R_{n+1} by numerical rank, and the
degree-3 quadraticity comparison span(K (x) R_1 + R_1 (x) K) = ker(mu_3) with
K = ker(mu_2).  Structure-constant magnitudes can be compared against theta
constants; that report is diagnostic only, since no normalization of the
(r, l) labels is fixed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .heis_module import ModuleElement, balanced_product, holomorphic_element
from .heis_rep import FiniteVector
from .qfield import RMData
from .theta import theta_const

_TWO_PI_I = 2j * math.pi


def piece_dim(n: int, data: RMData) -> int:
    """dim R_n: c_n from the exact matrix power, 1 for the unit piece."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n == 0:
        return 1
    return data.power(n).c


@dataclass(frozen=True)
class GradedPiece:
    degree: int
    dimension: int


class RingElement:
    """Finitely supported map degree -> coefficient vector of length dim R_n."""

    __slots__ = ("data", "tau", "coeffs")

    def __init__(self, data: RMData, tau: complex, coeffs: dict | None = None):
        tau = complex(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        clean: dict[int, np.ndarray] = {}
        for n, vec in (coeffs or {}).items():
            vec = np.asarray(vec, dtype=complex)
            if vec.shape != (piece_dim(n, data),):
                raise ValueError(f"degree {n} expects length {piece_dim(n, data)}")
            if np.any(vec != 0):
                clean[int(n)] = vec
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("RingElement is immutable")

    @classmethod
    def unit(cls, data: RMData, tau: complex, z: complex = 1.0) -> "RingElement":
        return cls(data, tau, {0: np.array([z], dtype=complex)})

    @classmethod
    def basis(cls, data: RMData, tau: complex, n: int, j: int) -> "RingElement":
        vec = np.zeros(piece_dim(n, data), dtype=complex)
        vec[j % len(vec)] = 1.0
        return cls(data, tau, {n: vec})

    @classmethod
    def from_piece(cls, data: RMData, tau: complex, n: int, vec) -> "RingElement":
        return cls(data, tau, {n: np.asarray(vec, dtype=complex)})

    def degrees(self) -> list[int]:
        return sorted(self.coeffs)

    def piece(self, n: int) -> np.ndarray:
        return self.coeffs.get(n, np.zeros(piece_dim(n, self.data), dtype=complex))

    def __add__(self, other: "RingElement") -> "RingElement":
        out = {n: v.copy() for n, v in self.coeffs.items()}
        for n, v in other.coeffs.items():
            out[n] = out.get(n, 0) + v
        return RingElement(self.data, self.tau, out)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + other.scaled(-1.0)

    def scaled(self, z) -> "RingElement":
        return RingElement(self.data, self.tau, {n: z * v for n, v in self.coeffs.items()})

    def to_module(self, n: int) -> ModuleElement:
        """Degree-n piece as a module element (single holomorphic term)."""
        if n == 0:
            raise ValueError("the unit piece has no module realization")
        vec = self.piece(n)
        return holomorphic_element(self.data, n, self.tau, weights=FiniteVector(vec))

    def distance(self, other: "RingElement") -> float:
        ns = set(self.coeffs) | set(other.coeffs)
        if not ns:
            return 0.0
        return max(float(np.max(np.abs(self.piece(n) - other.piece(n)))) for n in ns)

    def norm(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(v))) for v in self.coeffs.values())

    def __repr__(self):
        return f"RingElement(degrees={self.degrees()})"

    def to_json_dict(self) -> dict:
        return {str(n): [[z.real, z.imag] for z in v] for n, v in self.coeffs.items()}


# -- expansion of products back into the holomorphic basis ---------------------


def _holomorphic_grid(data: RMData, tau: complex, N: int):
    eps = data.power(N).eps
    alpha = tau / (2.0 * eps)
    sigma = 1.0 / (2.0 * math.sqrt(math.pi * alpha.imag))
    points = max(4 * data.power(N).c, 48)
    us = np.linspace(-4.0 * sigma, 4.0 * sigma, points)
    fvals = np.exp(_TWO_PI_I * alpha * us ** 2)
    return us, fvals, float(np.vdot(fvals, fvals).real)


def _expand(prod: ModuleElement, data: RMData, tau: complex, N: int):
    """Project each delta component of ``prod`` on f_{tau,N}; vector + residual."""
    us, fvals, denom = _holomorphic_grid(data, tau, N)
    cN = data.power(N).c
    vec = np.zeros(cN, dtype=complex)
    worst = 0.0
    samples = prod.sample(us)
    for j in range(cN):
        h = samples[j]
        cj = complex(np.vdot(fvals, h)) / denom
        vec[j] = cj
        hn = float(np.linalg.norm(h))
        if hn > 0:
            worst = max(worst, float(np.linalg.norm(h - cj * fvals)) / hn)
    return vec, worst


def mult(u: RingElement, v: RingElement, tol: float = 1e-9):
    """Graded product; returns (RingElement, report with residuals)."""
    if u.data != v.data or u.tau != v.tau:
        raise ValueError("operands must share RMData and tau")
    data, tau = u.data, u.tau
    out: dict[int, np.ndarray] = {}

    def acc(n, vec):
        out[n] = out.get(n, np.zeros(piece_dim(n, data), dtype=complex)) + vec

    report = {"max_residual": 0.0, "max_cond": 1.0, "pairs": []}
    for p in u.degrees():
        for q in v.degrees():
            up, vq = u.piece(p), v.piece(q)
            if p == 0:
                acc(q, up[0] * vq)
                continue
            if q == 0:
                acc(p, vq[0] * up)
                continue
            prod, prep = balanced_product(u.to_module(p), v.to_module(q), tol=tol)
            vec, res = _expand(prod, data, tau, p + q)
            acc(p + q, vec)
            res = max(res, prep["max_residual"])
            report["pairs"].append({"degrees": [p, q], "residual": res, "cond": prep["max_cond"]})
            report["max_residual"] = max(report["max_residual"], res)
            report["max_cond"] = max(report["max_cond"], prep["max_cond"])
    return RingElement(data, tau, out), report


# -- structure tensors ---------------------------------------------------------


@dataclass
class StructureTensor:
    degrees: tuple[int, int]
    tensor: np.ndarray            # shape (c_{m+n}, c_m, c_n)
    residuals: np.ndarray         # shape (c_m, c_n)
    max_cond: float = 1.0
    notes: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    def contract(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("jkl,k,l->j", self.tensor, x, y)


def structure_tensor(m: int, n: int, data: RMData, tau: complex, tol: float = 1e-9) -> StructureTensor:
    """Products of all basis pairs R_m x R_n expanded over the R_{m+n} basis."""
    cm, cn, cN = piece_dim(m, data), piece_dim(n, data), piece_dim(m + n, data)
    T = np.zeros((cN, cm, cn), dtype=complex)
    res = np.zeros((cm, cn))
    max_cond = 1.0
    for k in range(cm):
        xi = holomorphic_element(data, m, tau, k=k)
        for l in range(cn):
            eta = holomorphic_element(data, n, tau, k=l)
            prod, prep = balanced_product(xi, eta, tol=tol)
            vec, r = _expand(prod, data, tau, m + n)
            T[:, k, l] = vec
            res[k, l] = max(r, prep["max_residual"])
            max_cond = max(max_cond, prep["max_cond"])
    return StructureTensor((m, n), T, res, max_cond)


def cyclic_shifts(m: int, n: int, data: RMData) -> tuple[int, int, int]:
    """Simultaneous index shifts fixing the structure tensor.

    Shifting the output index by sigma_N = c_N/gcd(c_m, c_N) is undone by
    reindexing the averaging series s -> s - delta with delta = sigma_N c_m /
    c_N = c_m/gcd, which shifts the degree-m index by delta and the degree-n
    index by sigma_N - delta*a_n; all three are integers and the tensor is
    invariant under the simultaneous cyclic shift.
    """
    cm = data.power(m).c
    cn = data.power(n).c
    cN = data.power(m + n).c
    an = data.power(n).a
    g = math.gcd(cm, cN)
    sigma_N = cN // g
    delta = (sigma_N * cm) // cN
    sigma_m = delta
    sigma_n = sigma_N - delta * an
    return sigma_N, sigma_m % cm, sigma_n % cn


def cyclic_symmetry_residual(st: StructureTensor, data: RMData) -> float:
    m, n = st.degrees
    cN, cm, cn = st.tensor.shape
    sN, sm, sn = cyclic_shifts(m, n, data)
    shifted = np.roll(np.roll(np.roll(st.tensor, sN, axis=0), sm, axis=1), sn, axis=2)
    scale = float(np.max(np.abs(st.tensor)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(shifted - st.tensor))) / scale


# -- ring condition checks -----------------------------------------------------


def _numerical_rank(M: np.ndarray, rel_tol: float) -> int:
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def check_generation(data: RMData, tau: complex, N: int, rank_tol: float = 1e-8) -> dict:
    """Surjectivity of R_1 (x) R_n -> R_{n+1} for n < N, by numerical rank."""
    out = {"max_degree": N, "per_degree": [], "generated": True}
    tensors = {}
    for n in range(1, N):
        st = structure_tensor(1, n, data, tau)
        tensors[(1, n)] = st
        cN = piece_dim(n + 1, data)
        M = st.tensor.reshape(cN, -1)
        rank = _numerical_rank(M, rank_tol)
        ok = rank == cN
        out["per_degree"].append({
            "source": [1, n], "target_dim": cN, "rank": rank,
            "surjective": ok, "residual": st.max_residual,
        })
        out["generated"] = out["generated"] and ok
    out["tensors"] = tensors
    return out


def _null_space(M: np.ndarray, rel_tol: float) -> np.ndarray:
    u, sv, vh = np.linalg.svd(M)
    if sv.size == 0 or sv[0] == 0:
        return np.eye(M.shape[1], dtype=complex)
    rank = int(np.sum(sv > rel_tol * sv[0]))
    return vh[rank:].conj().T


def check_quadratic(data: RMData, tau: complex, rank_tol: float = 1e-7) -> dict:
    """Degree-3 quadraticity: span(K(x)R_1 + R_1(x)K) = ker(mu_3), K = ker(mu_2)."""
    c1 = piece_dim(1, data)
    c2 = piece_dim(2, data)
    c3 = piece_dim(3, data)
    t11 = structure_tensor(1, 1, data, tau)
    t21 = structure_tensor(2, 1, data, tau)
    M2 = t11.tensor.reshape(c2, c1 * c1)
    K = _null_space(M2, rank_tol)
    dim_K = K.shape[1]

    # mu_3 = mu_2 o (mu_2 (x) id): index (j; p,q,r)
    M3 = np.einsum("jtr,tpq->jpqr", t21.tensor, t11.tensor).reshape(c3, c1 ** 3)
    ker3 = c1 ** 3 - _numerical_rank(M3, rank_tol)

    # S = K (x) R_1 + R_1 (x) K inside C^{c1^3}
    cols = []
    eye = np.eye(c1, dtype=complex)
    for i in range(dim_K):
        k = K[:, i].reshape(c1, c1)
        for r in range(c1):
            cols.append(np.einsum("pq,r->pqr", k, eye[r]).reshape(-1))
            cols.append(np.einsum("p,qr->pqr", eye[r], k).reshape(-1))
    S = np.column_stack(cols) if cols else np.zeros((c1 ** 3, 0), dtype=complex)
    span_S = _numerical_rank(S, rank_tol)

    # S must sit inside ker(mu_3) by associativity; record the violation level
    inclusion = 0.0
    if S.size:
        m3max = float(np.max(np.abs(M3))) or 1.0
        inclusion = float(np.max(np.abs(M3 @ S))) / m3max

    report = {
        "dim_K": dim_K,
        "expected_dim_K": c1 * c1 - c2,
        "ker3_dim": ker3,
        "span_dim": span_S,
        "inclusion_residual": inclusion,
        "max_product_residual": max(t11.max_residual, t21.max_residual),
        "quadratic": bool(span_S == ker3),
    }
    return report


def associativity_residual(data: RMData, tau: complex, triples: int = 20, seed: int = 0) -> float:
    """Worst relative defect of (uv)w vs u(vw) over random degree-1 triples."""
    rng = np.random.default_rng(seed)
    c1 = piece_dim(1, data)
    worst = 0.0
    for _ in range(triples):
        u, v, w = (
            RingElement.from_piece(data, tau, 1, rng.normal(size=c1) + 1j * rng.normal(size=c1))
            for _ in range(3)
        )
        uv, _ = mult(u, v)
        lhs, _ = mult(uv, w)
        vw, _ = mult(v, w)
        rhs, _ = mult(u, vw)
        worst = max(worst, lhs.distance(rhs) / max(rhs.norm(), 1e-300))
    return worst


def theta_match_report(st: StructureTensor, tau: complex, l_max: int = 4,
                       entries: int = 8, tol: float = 1e-12) -> list[dict]:
    """Diagnostic: nearest |theta_r(l*tau)| for the largest tensor magnitudes.

    The (r, l) labels of the structure constants carry no fixed normalization
    here, so this is a search over a small grid, reported but never asserted.
    """
    from fractions import Fraction

    cN = st.tensor.shape[0]
    flat = np.abs(st.tensor).ravel()
    idx = np.argsort(flat)[::-1][:entries]
    out = []
    grid = []
    for l in range(1, l_max + 1):
        for num in range(0, 2 * cN):
            r = Fraction(num, 2 * cN)
            val = abs(complex(theta_const(r, l * tau, tol=tol).value))
            grid.append((float(r), l, val))
    for i in idx:
        mag = float(flat[i])
        if mag == 0:
            continue
        best = min(grid, key=lambda t: abs(t[2] - mag))
        out.append({
            "index": [int(x) for x in np.unravel_index(i, st.tensor.shape)],
            "magnitude": mag,
            "nearest": {"r": best[0], "l": best[1], "value": best[2],
                        "rel_gap": abs(best[2] - mag) / mag},
        })
    return out


def ring_report(data: RMData, tau: complex, max_degree: int = 3,
                assoc_triples: int = 20, seed: int = 0) -> dict:
    """Full JSON-ready summary used by the command line runner."""
    dims = [piece_dim(n, data) for n in range(max_degree + 1)]
    gen = check_generation(data, tau, max_degree)
    tensors = []
    for (m, n), st in gen["tensors"].items():
        tensors.append({
            "degrees": [m, n],
            "shape": list(st.tensor.shape),
            "max_residual": st.max_residual,
            "cyclic_symmetry_residual": cyclic_symmetry_residual(st, data),
        })
    report = {
        "dims": dims,
        "generation": [d["surjective"] for d in gen["per_degree"]],
        "generation_detail": gen["per_degree"],
        "assoc_residual": associativity_residual(data, tau, assoc_triples, seed),
        "tensors": tensors,
    }
    if gen["generated"] and max_degree >= 3:
        quad = check_quadratic(data, tau)
        report["quadratic"] = quad["quadratic"]
        report["quadratic_detail"] = {k: v for k, v in quad.items() if k != "quadratic"}
    else:
        report["quadratic"] = None
    return report
