"""Structured even pencils ``L(z) = M + zN`` and eigenpair queries.

The pencil is built from five blocks::

        [ 0       J-R   B ]       [ 0     E   0 ]
    M = [ (J-R)^H  0    0 ]   N = [ -E^H  0   0 ]
        [ B^H      0    S ]       [ 0     0   0 ]

with ``J`` skew-Hermitian, ``R`` and ``E`` Hermitian and ``S`` Hermitian
positive definite, so that ``M`` is Hermitian and ``N`` skew-Hermitian.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Iterable

import numpy as np

from .errors import InvalidPencil, InvalidQuery, InvalidScope

__all__ = [
    "SYM_TOL",
    "Blocks",
    "Structure",
    "Field",
    "PerturbationScope",
    "StructuredPencil",
    "EigenPairQuery",
    "Perturbation",
    "ReportKind",
    "Condition",
    "BackwardErrorReport",
    "assemble_M",
    "assemble_N",
    "evaluate",
    "residual",
    "perturbation_matrices",
    "perturbed_evaluate",
]

SYM_TOL = 1e-12
PD_TOL = 1e-12
IMAG_TOL = 1e-12
MIN_ABS_LAMBDA = 1e-300


class Blocks(enum.Enum):
    """The eleven perturbed-block subsets."""

    JE = "JE"
    RE = "RE"
    JR = "JR"
    JB = "JB"
    RB = "RB"
    EB = "EB"
    JRB = "JRB"
    REB = "REB"
    JEB = "JEB"
    JRE = "JRE"
    JREB = "JREB"

    @property
    def letters(self) -> frozenset[str]:
        return frozenset(self.value)

    @property
    def has_b(self) -> bool:
        return "B" in self.value

    @classmethod
    def parse(cls, text: "str | Blocks") -> "Blocks":
        if isinstance(text, Blocks):
            return text
        key = text.strip().upper()
        # accept any letter order, e.g. "EJ" or "J,E"
        letters = set(key.replace(",", "").replace(" ", ""))
        for member in cls:
            if set(member.value) == letters:
                return member
        raise InvalidScope(f"unknown block subset {text!r}")


class Structure(enum.Enum):
    BLOCK = "block"
    SYMMETRY = "sym"


class Field(enum.Enum):
    COMPLEX = "complex"
    REAL = "real"


SYMMETRY_SCOPES = frozenset(
    {Blocks.JE, Blocks.RE, Blocks.JR, Blocks.JRB, Blocks.REB, Blocks.JRE, Blocks.JREB}
)
REAL_SCOPES = {
    Structure.BLOCK: frozenset({Blocks.JR, Blocks.JB, Blocks.RB, Blocks.EB, Blocks.JRB}),
    Structure.SYMMETRY: frozenset({Blocks.JR, Blocks.JRB}),
}
# symmetry scopes for which only lower/upper bounds are available
BOUND_SCOPES = frozenset({Blocks.RE, Blocks.REB, Blocks.JRE, Blocks.JREB})


@dataclass(frozen=True)
class PerturbationScope:
    """Perturbed blocks together with a structure class and a number field."""

    blocks: Blocks
    structure: Structure = Structure.BLOCK
    field: Field = Field.COMPLEX

    def __post_init__(self):
        object.__setattr__(self, "blocks", Blocks.parse(self.blocks))
        object.__setattr__(self, "structure", Structure(self.structure))
        object.__setattr__(self, "field", Field(self.field))
        if self.structure is Structure.SYMMETRY and self.blocks not in SYMMETRY_SCOPES:
            raise InvalidScope(
                f"symmetry-preserving errors are not available for {self.blocks.value}"
            )
        if self.field is Field.REAL and self.blocks not in REAL_SCOPES[self.structure]:
            raise InvalidScope(
                f"real {self.structure.value} errors are not available for {self.blocks.value}"
            )

    @property
    def is_bounds(self) -> bool:
        return (
            self.structure is Structure.SYMMETRY
            and self.field is Field.COMPLEX
            and self.blocks in BOUND_SCOPES
        )

    @property
    def label(self) -> str:
        return f"{self.blocks.value}/{self.structure.value}/{self.field.value}"


def _as_matrix(name: str, value, shape: tuple[int, int]) -> np.ndarray:
    arr = np.array(value, dtype=complex)
    if arr.ndim == 0 and shape == (1, 1):
        arr = arr.reshape(1, 1)
    if arr.shape != shape:
        raise InvalidPencil(f"block {name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidPencil(f"block {name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_class(name: str, A: np.ndarray, sign: int) -> None:
    # sign=+1: Hermitian, sign=-1: skew-Hermitian
    tol = SYM_TOL * max(1.0, np.linalg.norm(A))
    dev = np.max(np.abs(A.conj().T - sign * A), initial=0.0)
    if dev > tol:
        kind = "Hermitian" if sign > 0 else "skew-Hermitian"
        raise InvalidPencil(f"block {name} is not {kind} (deviation {dev:.3e} > {tol:.3e})")


@dataclass(frozen=True, eq=False)
class StructuredPencil:
    """Blocks ``J, R, E, B, S`` of a structured even pencil.

    Arrays are copied to read-only complex arrays; invalid blocks raise
    :class:`InvalidPencil` instead of being repaired.
    """

    J: np.ndarray
    R: np.ndarray
    E: np.ndarray
    B: np.ndarray
    S: np.ndarray
    n: int = dc_field(init=False)
    m: int = dc_field(init=False)

    def __post_init__(self):
        B = np.array(self.B, dtype=complex)
        if B.ndim != 2:
            raise InvalidPencil(f"block B must be a matrix, got ndim={B.ndim}")
        n, m = B.shape
        if n < 1 or m < 1:
            raise InvalidPencil("dimensions n and m must be positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        for name, shape in (("J", (n, n)), ("R", (n, n)), ("E", (n, n)), ("B", (n, m)), ("S", (m, m))):
            object.__setattr__(self, name, _as_matrix(name, getattr(self, name), shape))
        _check_class("J", self.J, -1)
        _check_class("R", self.R, +1)
        _check_class("E", self.E, +1)
        _check_class("S", self.S, +1)
        herm = (self.S + self.S.conj().T) / 2
        smallest = np.linalg.eigvalsh(herm)[0]
        if smallest <= PD_TOL * np.linalg.norm(self.S):
            raise InvalidPencil(f"block S is not positive definite (smallest eigenvalue {smallest:.3e})")

    @property
    def is_real(self) -> bool:
        return all(
            np.max(np.abs(A.imag), initial=0.0) <= SYM_TOL * max(1.0, np.linalg.norm(A))
            for A in (self.J, self.R, self.E, self.B, self.S)
        )

    @property
    def size(self) -> int:
        return 2 * self.n + self.m

    def blocks(self) -> dict[str, np.ndarray]:
        return {"J": self.J, "R": self.R, "E": self.E, "B": self.B, "S": self.S}

    def A(self, lam: complex) -> np.ndarray:
        """``J - R + lam*E``, the (1,2) block of ``L(lam)``."""
        return self.J - self.R + lam * self.E

    def __repr__(self) -> str:
        return f"StructuredPencil(n={self.n}, m={self.m}, is_real={self.is_real})"


@dataclass(frozen=True, eq=False)
class EigenPairQuery:
    """Candidate eigenvalue ``lam`` on the imaginary axis and vector ``(x1, x2, x3)``.

    A real part within ``1e-12*|lam|`` is dropped; anything larger is
    rejected.
    """

    lam: complex
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray

    def __post_init__(self):
        lam = complex(self.lam)
        if not np.isfinite(lam) or abs(lam) < MIN_ABS_LAMBDA:
            raise InvalidQuery("lambda must be a nonzero purely imaginary number (lambda in iR\\{0})")
        if abs(lam.real) > IMAG_TOL * abs(lam):
            raise InvalidQuery(
                f"lambda={lam} is not purely imaginary; only lambda in iR\\{{0}} is supported"
            )
        object.__setattr__(self, "lam", complex(0.0, lam.imag))
        for name in ("x1", "x2", "x3"):
            v = np.array(getattr(self, name), dtype=complex).reshape(-1)
            if not np.all(np.isfinite(v)):
                raise InvalidQuery(f"vector {name} contains non-finite entries")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if len(self.x1) != len(self.x2):
            raise InvalidQuery("x1 and x2 must have the same length")
        if not np.any(self.x):
            raise InvalidQuery("x must be nonzero")

    @property
    def x(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2, self.x3])

    def scaled(self, c: complex) -> "EigenPairQuery":
        return EigenPairQuery(self.lam, c * self.x1, c * self.x2, c * self.x3)

    def check_dims(self, p: StructuredPencil) -> None:
        if len(self.x1) != p.n or len(self.x3) != p.m:
            raise InvalidQuery(
                f"vector sizes ({len(self.x1)}, {len(self.x2)}, {len(self.x3)}) "
                f"do not match pencil (n={p.n}, m={p.m})"
            )


def assemble_M(p: StructuredPencil) -> np.ndarray:
    n, m = p.n, p.m
    A = p.J - p.R
    M = np.zeros((2 * n + m, 2 * n + m), dtype=complex)
    M[:n, n:2 * n] = A
    M[:n, 2 * n:] = p.B
    M[n:2 * n, :n] = A.conj().T
    M[2 * n:, :n] = p.B.conj().T
    M[2 * n:, 2 * n:] = p.S
    return M


def assemble_N(p: StructuredPencil) -> np.ndarray:
    n, m = p.n, p.m
    N = np.zeros((2 * n + m, 2 * n + m), dtype=complex)
    N[:n, n:2 * n] = p.E
    N[n:2 * n, :n] = -p.E.conj().T
    return N


def evaluate(p: StructuredPencil, z: complex) -> np.ndarray:
    return assemble_M(p) + z * assemble_N(p)


def residual(p: StructuredPencil, q: EigenPairQuery) -> float:
    q.check_dims(p)
    return float(np.linalg.norm(evaluate(p, q.lam) @ q.x))


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Perturbation blocks; blocks outside the scope are zero."""

    dJ: np.ndarray
    dR: np.ndarray
    dE: np.ndarray
    dB: np.ndarray

    @classmethod
    def zeros(cls, n: int, m: int) -> "Perturbation":
        z = np.zeros((n, n), dtype=complex)
        return cls(z, z.copy(), z.copy(), np.zeros((n, m), dtype=complex))

    @classmethod
    def from_parts(cls, n: int, m: int, **parts) -> "Perturbation":
        base = cls.zeros(n, m)
        kw = {k: np.asarray(parts.get(k, getattr(base, k)), dtype=complex) for k in ("dJ", "dR", "dE", "dB")}
        return cls(**kw)

    def items(self) -> Iterable[tuple[str, np.ndarray]]:
        return (("J", self.dJ), ("R", self.dR), ("E", self.dE), ("B", self.dB))

    def norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(D) ** 2 for _, D in self.items())))


def perturbation_matrices(delta: Perturbation, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``(dM, dN)`` placing the perturbation blocks at their pencil positions."""
    dA = delta.dJ - delta.dR
    dM = np.zeros((2 * n + m, 2 * n + m), dtype=complex)
    dM[:n, n:2 * n] = dA
    dM[n:2 * n, :n] = dA.conj().T
    dM[:n, 2 * n:] = delta.dB
    dM[2 * n:, :n] = delta.dB.conj().T
    dN = np.zeros_like(dM)
    dN[:n, n:2 * n] = delta.dE
    dN[n:2 * n, :n] = -delta.dE.conj().T
    return dM, dN


def perturbed_evaluate(p: StructuredPencil, delta: Perturbation, z: complex) -> np.ndarray:
    """``(L - dL)(z)``."""
    dM, dN = perturbation_matrices(delta, p.n, p.m)
    return evaluate(p, z) - (dM + z * dN)


class ReportKind(enum.Enum):
    EXACT = "exact"
    BOUNDS = "bounds"
    INFINITE = "infinite"


@dataclass(frozen=True)
class Condition:
    """One finiteness condition with its measured residual."""

    name: str
    residual: float
    threshold: float
    passed: bool


@dataclass(frozen=True, eq=False)
class BackwardErrorReport:
    """Result of a structured eigenpair backward error computation.

    ``search_upper`` holds the best objective found by the feasible-point
    search for bound scopes; it is reported next to, never instead of,
    the closed-form ``upper``.
    """

    scope: PerturbationScope
    kind: ReportKind
    value: float | None = None
    lower: float | None = None
    upper: float | None = None
    finiteness: tuple[Condition, ...] = ()
    minimizer: Perturbation | None = None
    search_upper: float | None = None
    search_point: Perturbation | None = None

    def __post_init__(self):
        failed = any(not c.passed for c in self.finiteness)
        if (self.kind is ReportKind.INFINITE) != failed:
            raise ValueError("report kind inconsistent with finiteness diagnostics")
        if self.kind is ReportKind.BOUNDS and self.lower > self.upper + 1e-14 * max(1.0, self.upper):
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def is_finite(self) -> bool:
        return self.kind is not ReportKind.INFINITE

    @property
    def estimate(self) -> float:
        """Exact value, the upper bound for bound scopes, or ``inf``."""
        if self.kind is ReportKind.EXACT:
            return self.value
        if self.kind is ReportKind.BOUNDS:
            return self.upper
        return float("inf")

    @property
    def failed_conditions(self) -> list[str]:
        return [c.name for c in self.finiteness if not c.passed]
