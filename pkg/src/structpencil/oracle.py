"""Independent numerical checks and random test data.

``least_norm_feasible`` computes structured backward errors straight from
their definition: the allowed perturbation blocks are expanded in an
orthonormal real basis of their matrix class, the eigenpair condition
``dL(lam) x = L(lam) x`` becomes a real linear system in the coefficients,
and the minimum-norm solution of that system is the backward error. It
does not use the mapping formulas at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EmptyKernel, GenerationFailed, Infeasible
from .model import (
    Blocks,
    EigenPairQuery,
    Field,
    Perturbation,
    PerturbationScope,
    Structure,
    StructuredPencil,
    assemble_M,
    assemble_N,
    evaluate,
    perturbation_matrices,
    perturbed_evaluate,
)

__all__ = [
    "OracleConfig",
    "OracleResult",
    "least_norm_feasible",
    "oracle_solve",
    "certify_eigenvalue",
    "finite_spectrum",
    "random_structured_pencil",
    "admissible_query",
    "planted_instance",
]

PASSIVITY_MARGIN = 1e-6
INFINITE_EIG_TOL = 1e-12
EPS_PD = 0.1
MIN_ABS_T = 0.05
T_RANGE = 3.0


@dataclass(frozen=True)
class OracleConfig:
    restarts: int = 20
    max_iter: int = 500
    seed: int = 0
    tol_opt: float = 1e-9

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or self.tol_opt <= 0 or self.seed < 0:
            raise ValueError("restarts, max_iter and tol_opt must be positive and seed nonnegative")


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    perturbation: Perturbation
    residual: float
    restarts_used: int


# ---------------------------------------------------------------- bases


def _unit_matrix(rows: int, cols: int, i: int, j: int) -> np.ndarray:
    A = np.zeros((rows, cols), dtype=complex)
    A[i, j] = 1.0
    return A


def _basis(kind: str, rows: int, cols: int, real: bool) -> list[np.ndarray]:
    """Orthonormal basis (real Frobenius inner product) of a matrix class."""
    out = []
    if kind == "general":
        for i in range(rows):
            for j in range(cols):
                out.append(_unit_matrix(rows, cols, i, j))
                if not real:
                    out.append(1j * _unit_matrix(rows, cols, i, j))
        return out
    n = rows
    r2 = 1 / np.sqrt(2)
    herm = []
    for i in range(n):
        herm.append(("d", _unit_matrix(n, n, i, i)))
        for j in range(i + 1, n):
            Eij, Eji = _unit_matrix(n, n, i, j), _unit_matrix(n, n, j, i)
            herm.append(("s", (Eij + Eji) * r2))
            herm.append(("a", 1j * (Eij - Eji) * r2))
    if kind == "hermitian":
        return [A for tag, A in herm if not (real and tag == "a")]
    if kind == "skew":
        # i*Hermitian is skew-Hermitian; the real skew-symmetric part comes from i*(i(Eij-Eji))
        return [1j * A for tag, A in herm if not (real and tag != "a")]
    raise ValueError(kind)


def _block_classes(scope: PerturbationScope) -> dict[str, str]:
    sym = scope.structure is Structure.SYMMETRY
    classes = {}
    for letter in scope.blocks.value:
        if letter == "B":
            classes["B"] = "general"
        elif not sym:
            classes[letter] = "general"
        else:
            classes[letter] = "skew" if letter == "J" else "hermitian"
    return classes


def _parameterization(scope: PerturbationScope, n: int, m: int):
    real = scope.field is Field.REAL
    entries = []
    for letter, kind in _block_classes(scope).items():
        cols = m if letter == "B" else n
        for A in _basis(kind, n, cols, real):
            entries.append((letter, A))
    return entries


def _perturbation_from(entries, theta: np.ndarray, n: int, m: int) -> Perturbation:
    parts = {"dJ": np.zeros((n, n), complex), "dR": np.zeros((n, n), complex),
             "dE": np.zeros((n, n), complex), "dB": np.zeros((n, m), complex)}
    for (letter, A), t in zip(entries, theta):
        parts["d" + letter] = parts["d" + letter] + t * A
    return Perturbation(**parts)


def _constraint_system(scope: PerturbationScope, p: StructuredPencil, q: EigenPairQuery):
    n, m = p.n, p.m
    x = q.x / np.linalg.norm(q.x)
    lam = q.lam
    entries = _parameterization(scope, n, m)
    cols = []
    for letter, A in entries:
        single = {"dJ": np.zeros((n, n)), "dR": np.zeros((n, n)), "dE": np.zeros((n, n)), "dB": np.zeros((n, m))}
        single["d" + letter] = A
        dM, dN = perturbation_matrices(Perturbation(**single), n, m)
        cols.append((dM + lam * dN) @ x)
    C = np.column_stack(cols) if cols else np.zeros((2 * n + m, 0), complex)
    b = evaluate(p, lam) @ x
    Areal = np.vstack([C.real, C.imag])
    breal = np.concatenate([b.real, b.imag])
    return entries, Areal, breal


# ---------------------------------------------------------------- oracle


def oracle_solve(scope: PerturbationScope, p: StructuredPencil, q: EigenPairQuery,
                 cfg: OracleConfig | None = None) -> OracleResult:
    """Smallest perturbation in ``scope`` making ``(q.lam, q.x)`` an eigenpair.

    The least-norm point of the affine feasible set is found from random
    feasible starts by alternating a projection onto the null space
    complement with a residual correction; the best restart is returned.
    """
    cfg = cfg or OracleConfig()
    q.check_dims(p)
    entries, A, b = _constraint_system(scope, p, q)
    if A.shape[1] == 0:
        raise Infeasible("scope has no free parameters")
    U, sv, Vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(sv > 1e-12 * sv[0])) if sv.size and sv[0] > 0 else 0
    V1 = Vh[:rank].conj().T
    V2 = Vh[rank:].conj().T
    theta_p = V1 @ ((U[:, :rank].T @ b) / sv[:rank]) if rank else np.zeros(A.shape[1])
    scale = np.linalg.norm(b) + (sv[0] if sv.size else 0.0) * np.linalg.norm(theta_p)
    res = np.linalg.norm(A @ theta_p - b)
    if res > cfg.tol_opt * max(scale, 1e-300):
        raise Infeasible(f"no perturbation in {scope.label} is feasible (residual {res:.3e})")

    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.restarts):
        z = rng.standard_normal(V2.shape[1])
        theta = theta_p + V2 @ z
        for _ in range(cfg.max_iter):
            step = V2 @ (V2.T @ theta)
            theta = theta - step
            corr = A @ theta - b
            theta = theta - V1 @ ((U[:, :rank].T @ corr) / sv[:rank]) if rank else theta
            if np.linalg.norm(step) <= 1e-15 * max(1.0, np.linalg.norm(theta)):
                break
        val = np.linalg.norm(theta)
        if best is None or val < best[0]:
            best = (val, theta)
    val, theta = best
    delta = _perturbation_from(entries, theta, p.n, p.m)
    return OracleResult(float(val), delta, float(np.linalg.norm(A @ theta - b)), cfg.restarts)


def least_norm_feasible(scope, structure, p: StructuredPencil, q: EigenPairQuery,
                        cfg: OracleConfig | None = None, field=Field.COMPLEX) -> float:
    """Numerical structured backward error of ``q`` for ``scope``; raises :class:`Infeasible`."""
    if not isinstance(scope, PerturbationScope):
        scope = PerturbationScope(Blocks.parse(scope), Structure(structure), Field(field))
    return oracle_solve(scope, p, q, cfg).value


def certify_eigenvalue(p: StructuredPencil, minimizer_blocks: Perturbation, lam: complex) -> float:
    """Smallest singular value of the perturbed pencil ``(L - dL)(lam)``."""
    L = perturbed_evaluate(p, minimizer_blocks, lam)
    return float(np.linalg.svd(L, compute_uv=False)[-1])


# ---------------------------------------------------------------- generators


def finite_spectrum(p: StructuredPencil) -> np.ndarray:
    """Finite eigenvalues of ``M + zN``, i.e. of ``M v = z (-N) v``."""
    w = scipy.linalg.eig(assemble_M(p), -assemble_N(p), right=False, homogeneous_eigvals=True)
    alpha, beta = w
    finite = np.abs(beta) > INFINITE_EIG_TOL * np.abs(alpha)
    return alpha[finite] / beta[finite]


def _cgauss(rng, *shape, real=False):
    if real:
        return rng.standard_normal(shape).astype(complex)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _draw_pencil(rng, n: int, m: int, real: bool, r_rank: int, align: bool) -> StructuredPencil:
    G = _cgauss(rng, n, n, real=real)
    J = (G - G.conj().T) / 2
    GR = _cgauss(rng, r_rank, n, real=real)
    R = GR.conj().T @ GR
    GE = _cgauss(rng, n, n, real=real)
    E = (GE + GE.conj().T) / 2
    B = _cgauss(rng, n, m, real=real)
    if align and r_rank < n:
        # keep a common null vector of R and B^H so admissible queries exist
        K = scipy.linalg.null_space(R)
        v = K[:, 0]
        B = B - np.outer(v, v.conj() @ B)
    G2 = _cgauss(rng, m, m, real=real)
    S = G2.conj().T @ G2 + EPS_PD * np.eye(m)
    return StructuredPencil(J, (R + R.conj().T) / 2, E, B, (S + S.conj().T) / 2)


def random_structured_pencil(n: int, m: int, seed: int, strictly_passive: bool = True, *,
                             real: bool = False, r_rank: int | None = None,
                             align_kernel: bool = True, max_draws: int = 100) -> StructuredPencil:
    """Seeded random pencil with ``R`` positive semidefinite of rank ``r_rank``.

    By default ``R`` has rank ``n-2`` (at least 1 when n > 1) and ``B^H``
    shares a null vector with ``R``. With ``strictly_passive`` draws with
    a finite eigenvalue within ``1e-6`` of the imaginary axis are redrawn.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if r_rank is None:
        r_rank = max(n - 2, min(1, n - 1))
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        p = _draw_pencil(rng, n, m, real, r_rank, align_kernel)
        if not strictly_passive:
            return p
        ev = finite_spectrum(p)
        if np.all(np.abs(ev.real) > PASSIVITY_MARGIN):
            return p
    raise GenerationFailed(f"no strictly passive pencil after {max_draws} draws (n={n}, m={m}, seed={seed})")


def _null(A: np.ndarray) -> np.ndarray:
    return scipy.linalg.null_space(A, rcond=1e-10)


def _combo(rng, K: np.ndarray) -> np.ndarray:
    return K @ _cgauss(rng, K.shape[1])


def _draw_t(rng) -> float:
    while True:
        t = rng.uniform(-T_RANGE, T_RANGE)
        if abs(t) >= MIN_ABS_T:
            return float(t)


def admissible_query(p: StructuredPencil, seed: int, scope=None) -> EigenPairQuery:
    """Seeded query with ``x3 = 0`` satisfying the finiteness conditions of ``scope``.

    ``scope=None`` draws ``x1`` from ``null(B^H) & null(R)`` and ``x2`` from
    ``null(R)``, which makes every complex scope finite. Otherwise only the
    kernels needed by ``scope`` are used.
    """
    rng = np.random.default_rng(seed)
    n, m = p.n, p.m
    Bh = p.B.conj().T
    if scope is None:
        need = "all"
    else:
        if not isinstance(scope, PerturbationScope):
            scope = PerturbationScope(Blocks.parse(scope))
        if scope.structure is Structure.SYMMETRY and scope.blocks is Blocks.JE:
            need = "all"
        elif scope.blocks.has_b:
            need = "none"
        else:
            need = "b"
    t = _draw_t(rng)
    if need == "all":
        K1 = _null(np.vstack([Bh, p.R]))
        K2 = _null(p.R)
        if K1.shape[1] == 0 or K2.shape[1] == 0:
            raise EmptyKernel("null(B^H) & null(R) is trivial; lower the rank of R or widen the null space of B^H")
        x1, x2 = _combo(rng, K1), _combo(rng, K2)
    elif need == "b":
        K1 = _null(Bh)
        if K1.shape[1] == 0:
            raise EmptyKernel("null(B^H) is trivial; widen the null space of B^H")
        x1, x2 = _combo(rng, K1), _cgauss(rng, n)
    else:
        x1, x2 = _cgauss(rng, n), _cgauss(rng, n)
    return EigenPairQuery(1j * t, x1, x2, np.zeros(m))


def _planted_blocks(rng, scope: PerturbationScope, n: int, m: int, scale: float) -> Perturbation:
    real = scope.field is Field.REAL
    parts = {}
    for letter, kind in _block_classes(scope).items():
        cols = m if letter == "B" else n
        G = _cgauss(rng, n, cols, real=real)
        if kind == "hermitian":
            G = (G + G.conj().T) / 2
        elif kind == "skew":
            G = (G - G.conj().T) / 2
        parts["d" + letter] = scale * G / max(np.linalg.norm(G), 1e-300)
    return Perturbation.from_parts(n, m, **parts)


def planted_instance(n: int, m: int, scope, seed: int, scale: float = 0.5):
    """Pencil, exact eigenpair of ``L - dL0`` and the planted ``dL0`` in ``scope``.

    The returned query has ``x3 = 0`` and is an exact eigenpair of the
    pencil minus the planted perturbation, so the structured backward
    error of the query is at most ``dL0.norm()``. Real scopes yield a real
    pencil and a real planted perturbation.
    """
    if not isinstance(scope, PerturbationScope):
        scope = PerturbationScope(Blocks.parse(scope))
    real = scope.field is Field.REAL
    rng = np.random.default_rng(seed)
    lam = 1j * _draw_t(rng)
    d0 = _planted_blocks(rng, scope, n, m, scale)
    GE = _cgauss(rng, n, n, real=real)
    E = (GE + GE.conj().T) / 2
    Q = E - d0.dE
    # P + lam*Q must annihilate x2; P is real for real scopes
    x2 = _cgauss(rng, n)
    t = -lam * (Q @ x2)
    Z = _cgauss(rng, n, n, real=real)
    if real:
        X = np.column_stack([x2, x2.conj()])
        Xp = np.linalg.pinv(X)
        P = (np.column_stack([t, t.conj()]) @ Xp + Z @ (np.eye(n) - X @ Xp)).real.astype(complex)
    else:
        P = np.outer(t, x2.conj()) / np.vdot(x2, x2).real + Z @ (np.eye(n) - np.outer(x2, x2.conj()) / np.vdot(x2, x2).real)
    F = P + lam * Q
    U, _, _ = np.linalg.svd(F)
    x1 = U[:, -1]
    Dc = P + d0.dJ - d0.dR
    J = (Dc - Dc.conj().T) / 2
    R = -(Dc + Dc.conj().T) / 2
    G = _cgauss(rng, n, m, real=real)
    if real:
        K = scipy.linalg.orth(np.column_stack([x1.real, x1.imag]))
        B1 = G - K @ (K.T @ G)
    else:
        B1 = G - np.outer(x1, x1.conj() @ G)
    G2 = _cgauss(rng, m, m, real=real)
    S = G2.conj().T @ G2 + EPS_PD * np.eye(m)
    if real:
        J, R, E, B1, S = (A.real for A in (J, R, E, B1, S))
    p = StructuredPencil(J, R, E, B1 + d0.dB, (S + S.conj().T) / 2)
    q = EigenPairQuery(lam, x1, x2, np.zeros(m))
    return p, q, d0
