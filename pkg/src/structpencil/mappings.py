"""Minimal Frobenius-norm solutions of three matrix mapping problems.

* skew-Hermitian ``D`` with ``D X = Y``;
* general ``D`` with ``D u = r`` and ``D^H w = s``;
* real ``D`` with ``D u = r`` and ``D^T w = s`` for complex data.

Each solver returns a :class:`MapSolution`. When the existence conditions
fail a :class:`NoSolution` naming the failed condition is raised, unless
``raise_on_failure=False`` in which case ``exists`` is ``False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, NoSolution, RankDeficient

__all__ = [
    "RANK_TOL",
    "COMPAT_TOL",
    "MapSolution",
    "pseudoinverse",
    "skew_hermitian_minimal_map",
    "two_sided_minimal_map",
    "two_sided_formula",
    "real_two_sided_minimal_map",
    "pair_rank_ok",
]

RANK_TOL = 1e-12
COMPAT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MapSolution:
    exists: bool
    delta: np.ndarray | None
    fro_norm: float
    spectral_inf: float | None = None
    diagnostics: dict = field(default_factory=dict)


def pseudoinverse(A, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values below ``rank_tol*sigma_max`` are dropped."""
    A = np.asarray(A)
    if A.size == 0 or not np.any(A):
        return np.zeros(A.shape[::-1], dtype=np.result_type(A, float))
    return np.linalg.pinv(A, rcond=rank_tol)


def _fail(condition: str, resid: float, thresh: float, raise_on_failure: bool) -> MapSolution:
    if raise_on_failure:
        raise NoSolution(condition, resid, thresh)
    return MapSolution(False, None, float("nan"), None, {"failed": condition, "residual": resid})


def skew_hermitian_minimal_map(X, Y, rank_tol: float = RANK_TOL, *, raise_on_failure: bool = True) -> MapSolution:
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    Y = np.atleast_2d(np.asarray(Y, dtype=complex))
    if X.shape != Y.shape:
        raise ValueError(f"X and Y must have the same shape, got {X.shape} and {Y.shape}")
    Xp = pseudoinverse(X, rank_tol)
    YXp = Y @ Xp

    r1 = np.linalg.norm(YXp @ X - Y)
    t1 = COMPAT_TOL * (1.0 + np.linalg.norm(Y))
    if r1 > t1:
        return _fail("Y X^+ X = Y", r1, t1, raise_on_failure)
    YhX = Y.conj().T @ X
    r2 = np.linalg.norm(YhX + YhX.conj().T)
    t2 = COMPAT_TOL * (1.0 + 2 * np.linalg.norm(X) * np.linalg.norm(Y))
    if r2 > t2:
        return _fail("Y^H X = -X^H Y", r2, t2, raise_on_failure)

    delta = YXp - YXp.conj().T - Xp.conj().T @ X.conj().T @ Y @ Xp
    closed = 2 * np.linalg.norm(YXp) ** 2 - np.trace(YXp @ YXp.conj().T @ X @ Xp).real
    diag = {"closed_form_norm": float(np.sqrt(max(closed, 0.0)))}
    return MapSolution(True, delta, float(np.linalg.norm(delta)), None, diag)


def two_sided_formula(u, r, w, s) -> np.ndarray:
    """``r u^H/|u|^2 + w s^H/|w|^2 - (s^H u) w u^H/(|w|^2 |u|^2)`` without existence checks."""
    uu = np.vdot(u, u).real
    ww = np.vdot(w, w).real
    return (
        np.outer(r, u.conj()) / uu
        + np.outer(w, s.conj()) / ww
        - np.vdot(s, u) * np.outer(w, u.conj()) / (ww * uu)
    )


def two_sided_minimal_map(u, r, w, s, *, raise_on_failure: bool = True) -> MapSolution:
    u, r, w, s = (np.asarray(v, dtype=complex).reshape(-1) for v in (u, r, w, s))
    nu, nw = np.linalg.norm(u), np.linalg.norm(w)
    if nu == 0 or nw == 0:
        raise DegenerateInput("two-sided mapping needs nonzero u and w")
    nr, ns = np.linalg.norm(r), np.linalg.norm(s)
    gap = abs(np.vdot(u, s) - np.vdot(r, w))
    thresh = COMPAT_TOL * (1.0 + nu * ns + nr * nw)
    if gap > thresh:
        return _fail("u^H s = r^H w", gap, thresh, raise_on_failure)

    delta = two_sided_formula(u, r, w, s)
    fro = float(np.linalg.norm(delta))
    cross = abs(np.vdot(s, u)) ** 2
    base = nr**2 / nu**2 + ns**2 / nw**2
    # the alternative radical with a single power of |w||u| in the last term
    printed_sq = base - cross / (nw * nu)
    consistent = float(np.sqrt(max(base - cross / (nw**2 * nu**2), 0.0)))
    diag = {
        "norm_squared_denominators": consistent,
        "norm_single_denominator": float(np.sqrt(printed_sq)) if printed_sq >= 0 else float("nan"),
        "single_denominator_mismatch": bool(not np.isclose(np.sqrt(max(printed_sq, 0.0)), fro, rtol=1e-10, atol=1e-14)),
    }
    return MapSolution(True, delta, fro, float(max(nr / nu, ns / nw)), diag)


def pair_rank_ok(v, rank_tol: float = RANK_TOL) -> tuple[bool, float]:
    """Whether ``[v conj(v)]`` has rank two; returns the flag and ``sigma_2/sigma_1``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    sv = np.linalg.svd(np.column_stack([v, v.conj()]), compute_uv=False)
    if len(sv) < 2 or sv[0] == 0:
        return False, 0.0
    ratio = float(sv[1] / sv[0])
    return ratio > rank_tol, ratio


def real_two_sided_minimal_map(u, r, w, s, rank_tol: float = RANK_TOL, *, raise_on_failure: bool = True) -> MapSolution:
    u, r, w, s = (np.asarray(v, dtype=complex).reshape(-1) for v in (u, r, w, s))
    for name, v in (("u", u), ("w", w)):
        ok, ratio = pair_rank_ok(v, rank_tol)
        if not ok:
            raise RankDeficient(f"rank([{name} conj({name})]) < 2 (sigma ratio {ratio:.3e})")
    nu, nw, nr, ns = (np.linalg.norm(v) for v in (u, w, r, s))
    thresh = COMPAT_TOL * (1.0 + nu * ns + nr * nw)
    gap_h = abs(np.vdot(u, s) - np.vdot(r, w))
    if gap_h > thresh:
        return _fail("u^H s = r^H w", gap_h, thresh, raise_on_failure)
    gap_t = abs(u @ s - r @ w)
    if gap_t > thresh:
        return _fail("u^T s = r^T w", gap_t, thresh, raise_on_failure)

    U = np.column_stack([u, u.conj()])
    W = np.column_stack([w, w.conj()])
    Up = pseudoinverse(U, rank_tol)
    G = (np.column_stack([s, s.conj()]) @ pseudoinverse(W, rank_tol)).conj().T
    delta = np.column_stack([r, r.conj()]) @ Up + G - G @ U @ Up
    imag = float(np.max(np.abs(delta.imag), initial=0.0))
    return MapSolution(True, delta, float(np.linalg.norm(delta)), None, {"max_imag": imag})
