"""Tables, sweeps and the self-verification suite behind the CLI."""

from __future__ import annotations

import io
import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backward_errors as be
from .errors import Infeasible
from .mappings import real_two_sided_minimal_map, skew_hermitian_minimal_map, two_sided_minimal_map
from .model import (
    BackwardErrorReport,
    Blocks,
    EigenPairQuery,
    Field,
    PerturbationScope,
    ReportKind,
    Structure,
    StructuredPencil,
    evaluate,
    perturbed_evaluate,
)
from .oracle import (
    OracleConfig,
    admissible_query,
    certify_eigenvalue,
    least_norm_feasible,
    planted_instance,
    random_structured_pencil,
)

SQRT2 = np.sqrt(2.0)
ALL_BLOCKS = [b for b in Blocks]


def fmt(v: float | None, precision: int) -> str:
    if v is None:
        return "-"
    if not np.isfinite(v):
        return "inf"
    return f"{v:.{precision}g}"


def fmt_lambda(lam: complex, precision: int) -> str:
    return f"{lam.imag:.{precision}g}i"


# ---------------------------------------------------------------- compute


def report_record(rep: BackwardErrorReport) -> dict:
    out = {
        "scope": rep.scope.blocks.value,
        "structure": rep.scope.structure.value,
        "field": rep.scope.field.value,
        "kind": rep.kind.value,
        "value": rep.value,
        "lower": rep.lower,
        "upper": rep.upper,
        "search_upper": rep.search_upper,
        "finiteness": [
            {"name": c.name, "residual": c.residual, "threshold": c.threshold, "passed": c.passed}
            for c in rep.finiteness
        ],
    }
    if rep.minimizer is not None:
        out["minimizer"] = {
            f"d{k}": [[[float(z.real), float(z.imag)] for z in row] for row in D] for k, D in rep.minimizer.items()
        }
    return out


def format_report_text(rep: BackwardErrorReport, precision: int) -> str:
    lines = [f"scope {rep.scope.label}: {rep.kind.value}"]
    if rep.kind is ReportKind.EXACT:
        lines[0] += f" {fmt(rep.value, precision)}"
    elif rep.kind is ReportKind.BOUNDS:
        lines[0] += f" [{fmt(rep.lower, precision)}, {fmt(rep.upper, precision)}]"
        if rep.search_upper is not None:
            lines.append(f"  feasible-point search: {fmt(rep.search_upper, precision)}")
    for c in rep.finiteness:
        status = "pass" if c.passed else "FAIL"
        lines.append(f"  {c.name}: {status} (residual {c.residual:.3e}, threshold {c.threshold:.3e})")
    if rep.minimizer is not None:
        norms = ", ".join(f"|d{k}|={fmt(np.linalg.norm(D), precision)}" for k, D in rep.minimizer.items())
        lines.append(f"  minimizer: {norms}")
    return "\n".join(lines)


REPORT_CSV_HEADER = ["scope", "structure", "field", "kind", "value", "lower", "upper", "search_upper"]


def reports_csv(reports: list[BackwardErrorReport], precision: int | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_CSV_HEADER)
    for rep in reports:
        rec = report_record(rep)
        vals = [rec[k] for k in REPORT_CSV_HEADER[4:]]
        vals = ["" if v is None else (repr(v) if precision is None else fmt(v, precision)) for v in vals]
        w.writerow([rec["scope"], rec["structure"], rec["field"], rec["kind"], *vals])
    return buf.getvalue()


def reports_machine(reports: list[BackwardErrorReport]) -> str:
    return "\n".join(json.dumps(report_record(r)) for r in reports) + "\n"


# ---------------------------------------------------------------- sweep


def sweep_columns(blocks: list[Blocks], structures: list[Structure]) -> list[tuple[str, PerturbationScope]]:
    cols = []
    for b in blocks:
        for st in structures:
            if st is Structure.SYMMETRY and b not in (Blocks.JR, Blocks.JRB):
                continue
            prefix = "eta_B" if st is Structure.BLOCK else "eta_S"
            cols.append((f"{prefix}_{b.value}", PerturbationScope(b, st)))
    return cols


def grid_values(t_min: float, t_max: float, count: int, min_abs_t: float = 0.05) -> np.ndarray:
    ts = np.linspace(t_min, t_max, count) if count > 1 else np.array([t_min])
    return ts[np.abs(ts) >= min_abs_t]


def _sweep_row(p, cols, t):
    lam = 1j * t
    out = []
    for _, scope in cols:
        if scope.structure is Structure.BLOCK:
            out.append(be.eta_block_eigenvalue(scope, p, lam))
        else:
            out.append(be.eta_symmetry_eigenvalue(scope, p, lam))
    return out


def sweep(p: StructuredPencil, ts, cols, jobs: int = 1) -> np.ndarray:
    """Eigenvalue backward errors on ``lam = i t``; row order follows ``ts``."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(lambda t: _sweep_row(p, cols, t), ts))
    else:
        rows = [_sweep_row(p, cols, t) for t in ts]
    return np.array(rows, dtype=float).reshape(len(ts), len(cols))


def sweep_csv(ts, cols, values, precision: int | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [name for name, _ in cols])
    for t, row in zip(ts, values):
        cells = [repr(float(t))] + [repr(float(v)) if precision is None else fmt(v, precision) for v in row]
        w.writerow(cells)
    return buf.getvalue()


def sweep_minimizers(ts, cols, values) -> list[tuple[str, float, float]]:
    out = []
    for j, (name, _) in enumerate(cols):
        if len(ts) == 0:
            continue
        k = int(np.argmin(values[:, j]))
        out.append((name, float(ts[k]), float(values[k, j])))
    return out


# ---------------------------------------------------------------- compare

BLOCK_TABLE = [
    ("lambda", None), ("eta", None), ("eta_even", None),
    ("eta_B(J,E)", Blocks.JE), ("eta_B(E,B)", Blocks.EB), ("eta_B(J,B)", Blocks.JB), ("eta_B(J,E,B)", Blocks.JEB),
]
SYMMETRY_TABLE = [
    ("lambda", None), ("eta", None), ("eta_even", None), ("eta_S(J,E)", Blocks.JE),
    ("eta_S(R,E) lower", Blocks.RE), ("eta_S(R,E) upper", Blocks.RE),
    ("eta_S(J,R,E) lower", Blocks.JRE), ("eta_S(J,R,E) upper", Blocks.JRE),
]


@dataclass
class ComparisonRow:
    lam: complex
    eta: float
    eta_even: float
    block: dict[Blocks, float] = field(default_factory=dict)
    sym: dict[Blocks, BackwardErrorReport] = field(default_factory=dict)


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]

    def block_table(self) -> list[list[float | complex]]:
        return [
            [r.lam, r.eta, r.eta_even] + [SQRT2 * r.block[b] for _, b in BLOCK_TABLE[3:]]
            for r in self.rows
        ]

    def symmetry_table(self) -> list[list[float | complex]]:
        out = []
        for r in self.rows:
            je, re_, jre = r.sym[Blocks.JE], r.sym[Blocks.RE], r.sym[Blocks.JRE]
            out.append([
                r.lam, r.eta, r.eta_even, SQRT2 * je.estimate,
                SQRT2 * re_.lower, SQRT2 * re_.upper, SQRT2 * jre.lower, SQRT2 * jre.upper,
            ])
        return out


def comparison_row(p: StructuredPencil, q: EigenPairQuery) -> ComparisonRow:
    row = ComparisonRow(q.lam, be.eta_unstructured(p, q), be.eta_even(p, q))
    for b in ALL_BLOCKS:
        row.block[b] = be.eta_block(b, p, q).estimate
    for b in (Blocks.JE, Blocks.RE, Blocks.JR, Blocks.JRB, Blocks.REB, Blocks.JRE, Blocks.JREB):
        row.sym[b] = be.eta_symmetry(PerturbationScope(b, Structure.SYMMETRY), p, q)
    return row


def _rel_close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def row_violations(row: ComparisonRow) -> list[tuple[str, str]]:
    """Relations every comparison row must satisfy, as ``(kind, relation)`` failures.

    ``kind`` is ``"identity"`` for the equal-scope identities and
    ``"dominance"`` for inequalities.
    """
    bad = []
    if row.eta > row.eta_even + 1e-12 * max(1.0, row.eta_even):
        bad.append(("dominance", "eta <= eta_even"))
    for a, b in ((Blocks.RE, Blocks.JE), (Blocks.JEB, Blocks.REB), (Blocks.RB, Blocks.JB)):
        if not _rel_close(row.block[a], row.block[b], 1e-12):
            bad.append(("identity", f"eta_B({a.value}) = eta_B({b.value})"))
    for b, v in row.block.items():
        if not np.isfinite(v):
            continue
        if row.eta > SQRT2 * v + 1e-10:
            bad.append(("dominance", f"eta <= sqrt2*eta_B({b.value})"))
        # a block perturbation is an even one; dJ - dR shares one pencil block, hence factor 2
        factor = 2.0 if {"J", "R"} <= b.letters else SQRT2
        if row.eta_even > factor * v + 1e-10:
            bad.append(("dominance", f"eta_even <= {'2' if factor == 2.0 else 'sqrt2'}*eta_B({b.value})"))
    if row.block[Blocks.JEB] > row.block[Blocks.JE] + 1e-10:
        bad.append(("dominance", "eta_B(J,E,B) <= eta_B(J,E)"))
    for b, rep in row.sym.items():
        if not rep.is_finite:
            continue
        floor = rep.value if rep.kind is ReportKind.EXACT else rep.lower
        if rep.kind is ReportKind.BOUNDS and rep.lower > rep.upper + 1e-14 * max(1.0, rep.upper):
            bad.append(("dominance", f"lower <= upper for eta_S({b.value})"))
        if row.block[b] > floor + 1e-10:
            bad.append(("dominance", f"eta_B({b.value}) <= eta_S({b.value})"))
        if row.eta_even > SQRT2 * rep.estimate + 1e-10:
            bad.append(("dominance", f"eta_even <= sqrt2*eta_S({b.value})"))
    return bad


def build_comparison(p: StructuredPencil, num_lambdas: int, seed: int, jobs: int = 1) -> ComparisonTable:
    seeds = [[seed, k] for k in range(num_lambdas)]
    queries = [admissible_query(p, s) for s in seeds]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(lambda q: comparison_row(p, q), queries))
    else:
        rows = [comparison_row(p, q) for q in queries]
    for i, row in enumerate(rows):
        bad = row_violations(row)
        if bad:
            raise AssertionError(f"row {i} violates: {', '.join(rel for _, rel in bad)}")
    return ComparisonTable(rows)


def _cells(values, precision: int | None) -> list[str]:
    out = []
    for v in values:
        if isinstance(v, complex):
            out.append(fmt_lambda(v, precision or 17))
        else:
            out.append(repr(float(v)) if precision is None else fmt(v, precision))
    return out


def format_comparison(table: ComparisonTable, precision: int, output: str = "text") -> str:
    blocks = [
        ("Block-structure-preserving eigenpair backward errors (sqrt2-scaled)", BLOCK_TABLE, table.block_table()),
        ("Symmetry-structure-preserving eigenpair backward errors (sqrt2-scaled)", SYMMETRY_TABLE, table.symmetry_table()),
    ]
    if output == "csv" or output == "machine":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        prec = None if output == "machine" else precision
        for idx, (_, cols, rows) in enumerate(blocks, start=1):
            w.writerow(["table"] + [c for c, _ in cols])
            for r in rows:
                w.writerow([idx] + _cells(r, prec))
        return buf.getvalue()
    out = []
    for title, cols, rows in blocks:
        cells = [[c for c, _ in cols]] + [_cells(r, precision) for r in rows]
        widths = [max(len(row[j]) for row in cells) for j in range(len(cols))]
        out.append(title)
        for row in cells:
            out.append("  ".join(c.rjust(wd) for c, wd in zip(row, widths)))
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------- verify


@dataclass
class PropertyCount:
    passed: int = 0
    total: int = 0
    notes: list[str] = field(default_factory=list)

    def add(self, ok: bool, note: str = "") -> None:
        self.total += 1
        self.passed += bool(ok)
        if not ok and note and len(self.notes) < 5:
            self.notes.append(note)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _check_mappings(rng, instances: int, perturbations: int, counts: dict) -> None:
    c = counts.setdefault("mapping: skew-Hermitian", PropertyCount())
    for _ in range(instances):
        n, k = int(rng.integers(2, 6)), int(rng.integers(1, 3))
        G = _cgauss(rng, n, n)
        D0 = (G - G.conj().T) / 2
        X = _cgauss(rng, n, k)
        sol = skew_hermitian_minimal_map(X, D0 @ X)
        D = sol.delta
        ok = np.linalg.norm(D @ X - D0 @ X) <= 1e-10 * (1 + np.linalg.norm(D0 @ X))
        ok &= np.linalg.norm(D + D.conj().T) <= 1e-10 * max(1.0, np.linalg.norm(D))
        ok &= abs(sol.diagnostics["closed_form_norm"] - sol.fro_norm) <= 1e-10 * max(1.0, sol.fro_norm)
        Pi = np.eye(n) - X @ np.linalg.pinv(X)
        for _ in range(perturbations):
            W = _cgauss(rng, n, n)
            P = Pi @ ((W - W.conj().T) / 2) @ Pi
            ok &= np.linalg.norm(D + P) >= sol.fro_norm - 1e-10
        c.add(bool(ok), "skew-Hermitian map instance failed")

    c = counts.setdefault("mapping: two-sided", PropertyCount())
    for _ in range(instances):
        n, m = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        D0 = _cgauss(rng, n, m)
        u, w = _cgauss(rng, m), _cgauss(rng, n)
        sol = two_sided_minimal_map(u, D0 @ u, w, D0.conj().T @ w)
        D = sol.delta
        ok = np.linalg.norm(D @ u - D0 @ u) <= 1e-10 * (1 + np.linalg.norm(D0 @ u))
        ok &= np.linalg.norm(D.conj().T @ w - D0.conj().T @ w) <= 1e-10 * (1 + np.linalg.norm(D0.conj().T @ w))
        ok &= np.linalg.norm(D, 2) >= sol.spectral_inf - 1e-10
        Pw = np.eye(n) - np.outer(w, w.conj()) / np.vdot(w, w).real
        Pu = np.eye(m) - np.outer(u, u.conj()) / np.vdot(u, u).real
        for _ in range(perturbations):
            ok &= np.linalg.norm(D + Pw @ _cgauss(rng, n, m) @ Pu) >= sol.fro_norm - 1e-10
        c.add(bool(ok), "two-sided map instance failed")

    c = counts.setdefault("mapping: real two-sided", PropertyCount())
    for _ in range(instances):
        n, m = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        D0 = rng.standard_normal((n, m))
        u, w = _cgauss(rng, m), _cgauss(rng, n)
        sol = real_two_sided_minimal_map(u, D0 @ u, w, D0.T @ w)
        D = sol.delta
        ok = np.max(np.abs(D.imag)) <= 1e-10 * max(1.0, sol.fro_norm)
        D = D.real
        ok &= np.linalg.norm(D @ u - D0 @ u) <= 1e-10 * (1 + np.linalg.norm(D0 @ u))
        ok &= np.linalg.norm(D.T @ w - D0.T @ w) <= 1e-10 * (1 + np.linalg.norm(D0.T @ w))
        ok &= sol.fro_norm <= np.linalg.norm(D0) + 1e-10
        c.add(bool(ok), "real map instance failed")


def all_scopes() -> list[PerturbationScope]:
    out = [PerturbationScope(b) for b in ALL_BLOCKS]
    out += [PerturbationScope(b, Structure.SYMMETRY) for b in
            (Blocks.JE, Blocks.RE, Blocks.JR, Blocks.JRB, Blocks.REB, Blocks.JRE, Blocks.JREB)]
    return out


def real_scopes() -> list[PerturbationScope]:
    return [PerturbationScope(b, Structure.BLOCK, Field.REAL) for b in (Blocks.JR, Blocks.JB, Blocks.RB, Blocks.EB, Blocks.JRB)] + [
        PerturbationScope(b, Structure.SYMMETRY, Field.REAL) for b in (Blocks.JR, Blocks.JRB)
    ]


def _closure_ok(p, q, rep) -> bool:
    dL = perturbed_evaluate(p, rep.minimizer, q.lam)
    L = evaluate(p, q.lam)
    x = q.x / np.linalg.norm(q.x)
    return np.linalg.norm(dL @ x) <= 1e-10 * (np.linalg.norm(L) + np.linalg.norm(L - dL))


def run_verification(seed: int = 0, n: int = 4, m: int = 3, instances: int = 10,
                     cfg: OracleConfig | None = None, pencil: StructuredPencil | None = None) -> dict[str, PropertyCount]:
    """Run the invariant suite; returns pass counts per property."""
    cfg = cfg or OracleConfig(seed=seed)
    rng = np.random.default_rng(seed)
    counts: dict[str, PropertyCount] = {}
    _check_mappings(rng, instances, 10, counts)

    closure = counts.setdefault("residual closure", PropertyCount())
    oracle_c = counts.setdefault("oracle sandwich", PropertyCount())
    for k, scope in enumerate(all_scopes() + real_scopes()):
        for i in range(instances):
            p, q, d0 = planted_instance(n, m, scope, [seed, k, i])
            rep = be.backward_error(scope, p, q)
            if not rep.is_finite:
                closure.add(False, f"{scope.label}: planted instance reported infinite")
                oracle_c.add(False, f"{scope.label}: planted instance reported infinite")
                continue
            closure.add(_closure_ok(p, q, rep), f"{scope.label}: residual closure")
            try:
                o = least_norm_feasible(scope, None, p, q, cfg)
            except Infeasible:
                oracle_c.add(False, f"{scope.label}: oracle infeasible")
                continue
            if rep.kind is ReportKind.EXACT:
                ok = abs(rep.value - o) <= 1e-7 * max(o, 1e-12) and rep.value <= d0.norm() + 1e-8
            else:
                ok = rep.lower - 1e-8 <= o <= rep.upper + 1e-8
            oracle_c.add(ok, f"{scope.label}: closed form vs oracle")

    dom = counts.setdefault("dominance", PropertyCount())
    equal = counts.setdefault("equal-scope identities", PropertyCount())
    eig = counts.setdefault("eigenvalue certification", PropertyCount())
    for i in range(instances):
        p = pencil if pencil is not None else random_structured_pencil(n, m, int(rng.integers(2**31)))
        q = admissible_query(p, [seed, 1000 + i])
        row = comparison_row(p, q)
        bad = row_violations(row)
        dom_bad = [rel for kind, rel in bad if kind == "dominance"]
        eq_bad = [rel for kind, rel in bad if kind == "identity"]
        dom.add(not dom_bad, "; ".join(dom_bad))
        equal.add(not eq_bad, "; ".join(eq_bad))
        L = evaluate(p, q.lam)
        for scope in all_scopes():
            if scope.is_bounds or (scope.structure is Structure.SYMMETRY and scope.blocks not in (Blocks.JR, Blocks.JRB)):
                continue
            delta, _ = be.eigenvalue_minimizer(scope, p, q.lam)
            ok = certify_eigenvalue(p, delta, q.lam) <= 1e-10 * np.linalg.norm(L)
            if scope.structure is Structure.BLOCK:
                ok &= be.eta_block_eigenvalue(scope, p, q.lam) <= be.eta_block(scope, p, q).estimate + 1e-10
            else:
                ok &= be.eta_symmetry_eigenvalue(scope, p, q.lam) <= be.eta_symmetry(scope, p, q).estimate + 1e-10
            eig.add(bool(ok), f"{scope.label}: eigenvalue certification")
    return counts


def format_verification(counts: dict[str, PropertyCount]) -> str:
    width = max(len(k) for k in counts)
    lines = []
    for name, c in counts.items():
        lines.append(f"{name.ljust(width)}  {c.passed}/{c.total}  {'PASS' if c.ok else 'FAIL'}")
        for note in c.notes:
            lines.append(f"{'':{width}}    {note}")
    return "\n".join(lines)
