"""Database of local reduction bases over the pulse-center grid: congruence
alignment, persistence, interpolation and stacked-basis compression.

Interpolating between bases only makes sense when corresponding columns vary
continuously across the grid, so raw bases are first rotated to be congruent
with a reference entry (orthogonal Procrustes factor of the cross-Gramian).
Interpolation of an unaligned database is a contract error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import mmread, mmwrite

from .errors import AlignmentError, ContractError
from .spectral import LocalBasis, build_local_basis

__all__ = [
    "BasisDatabase",
    "StackedBasisMatrix",
    "congruent_align",
    "default_grid",
    "build_database",
    "interpolate_basis",
    "slow_basis_derivative",
    "stack_columns",
    "stack_orthonormalize",
    "modal_pod",
    "singular_value_profile",
    "save_database",
    "load_database",
]

log = logging.getLogger(__name__)

# Relative singular-value cutoff for rank decisions on stacked bases. The
# trailing singular values of a stacked mode database decay all the way to
# round-off, so the cutoff sits near (but safely above) machine zero; a
# looser cutoff such as 1e-8 visibly undercounts the span of the stack.
DEFAULT_SV_TOL = 5e-14


def congruent_align(v_ref, v_raw, min_singular=1e-12, return_rotation=False):
    """Rotate ``v_raw`` so its columns are consistent with ``v_ref``.

    Computes ``P = v_raw' v_ref``, its SVD ``P = L S R'`` and the orthogonal
    factor ``Q = L R'``; returns ``v_raw @ Q``, which spans the same subspace
    as ``v_raw``. Raises :class:`AlignmentError` when ``P`` is (numerically)
    rank deficient, i.e. the subspaces have an orthogonal direction and no
    congruence is defined.
    """
    v_ref = np.asarray(v_ref, dtype=float)
    v_raw = np.asarray(v_raw, dtype=float)
    if v_ref.shape != v_raw.shape:
        raise ContractError(
            f"basis shapes differ: {v_ref.shape} vs {v_raw.shape}"
        )
    p = v_raw.T @ v_ref
    left, sing, right_t = np.linalg.svd(p)
    if sing[-1] <= min_singular * max(sing[0], 1.0):
        raise AlignmentError(
            "no congruence direction: cross-Gramian is rank deficient "
            f"(smallest singular value {sing[-1]:.3e})"
        )
    q = left @ right_t
    aligned = v_raw @ q
    if return_rotation:
        return aligned, q
    return aligned


def default_grid(length, n_points=19):
    """Pulse-center grid ``j * L / (n_points + 1)``, j = 1..n_points."""
    j = np.arange(1, n_points + 1, dtype=float)
    return j * length / (n_points + 1)


@dataclass
class BasisDatabase:
    """Ordered, congruence-aligned local bases over an ascending grid."""

    grid: np.ndarray
    entries: list
    reference_index: int
    kind: str
    aligned: bool = True
    alignment_residuals: np.ndarray | None = None
    adjacent_angles: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.size == 0:
            raise ContractError("database grid is empty")
        if np.any(np.diff(self.grid) <= 0.0):
            raise ContractError("database grid must be strictly increasing")
        if len(self.entries) != self.grid.size:
            raise ContractError("one basis entry required per grid point")
        m = self.entries[0].m
        n = self.entries[0].n
        for e in self.entries:
            if e.m != m or e.n != n:
                raise ContractError("all database entries must share one shape")
            if e.kind != self.kind:
                raise ContractError("all database entries must share one kind")
        if not 0 <= self.reference_index < len(self.entries):
            raise ContractError("reference_index outside the grid")

    @property
    def n(self) -> int:
        return self.entries[0].n

    @property
    def m(self) -> int:
        return self.entries[0].m

    def __len__(self):
        return len(self.entries)

    def save(self, directory):
        save_database(self, directory)

    @classmethod
    def load(cls, directory):
        return load_database(directory)


def _principal_angle(va, vb):
    sing = np.linalg.svd(va.T @ vb, compute_uv=False)
    return float(np.arccos(np.clip(sing.min(), -1.0, 1.0)))


def build_database(model, grid, k, with_md=False, align=True, reference_index=None,
                   rank_tol=1e-10):
    """Build, then congruence-align, local bases on a pulse-center grid.

    Entries are built in grid order with the Newton solve warm-started from
    the previous equilibrium. The alignment reference defaults to the grid
    midpoint entry, which halves the maximum grid distance over which
    congruence must hold. Solver and eigenvalue failures propagate annotated
    with the failing grid point.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ContractError("grid must be nonempty")
    entries = []
    u_guess = None
    sign_reference = None
    for x_c in grid:
        try:
            entry = build_local_basis(model, x_c, k, with_md=with_md,
                                      u_guess=u_guess, rank_tol=rank_tol,
                                      sign_reference=sign_reference)
        except Exception as exc:
            raise type(exc)(f"database build failed at x_c = {x_c!r}: {exc}") from exc
        entries.append(entry)
        u_guess = entry.u_eq
        sign_reference = entry.info.get("modes")

    if reference_index is None:
        reference_index = len(entries) // 2
    kind = entries[0].kind

    residuals = np.zeros(len(entries))
    if align:
        v0 = entries[reference_index].matrix
        for j, entry in enumerate(entries):
            if j != reference_index:
                entry.matrix = congruent_align(v0, entry.matrix)
            cross = entry.matrix.T @ v0
            residuals[j] = np.linalg.norm(cross - cross.T)
        log.info("alignment symmetry residuals: max %.3e", residuals.max())

    angles = np.array([
        _principal_angle(entries[j].matrix, entries[j + 1].matrix)
        for j in range(len(entries) - 1)
    ])
    if angles.size:
        log.info("adjacent-entry principal angles [deg]: max %.2f",
                 np.degrees(angles.max()))
        if not np.all(np.isfinite(angles)):
            raise ContractError("non-finite adjacent subspace angle")

    return BasisDatabase(
        grid=grid,
        entries=entries,
        reference_index=int(reference_index),
        kind=kind,
        aligned=bool(align),
        alignment_residuals=residuals if align else None,
        adjacent_angles=angles,
    )


def _locate(db, x_c):
    grid = db.grid
    if x_c < grid[0] or x_c > grid[-1]:
        log.warning("x_c = %.6g outside the database span [%.6g, %.6g]; clamped",
                    x_c, grid[0], grid[-1])
        x_c = min(max(x_c, grid[0]), grid[-1])
    return x_c


def interpolate_basis(db, x_c, reorthonormalize=False):
    """Entrywise piecewise-linear interpolation of the basis and equilibrium.

    Requires an aligned database; positions outside the grid are clamped to
    the nearest end with a logged warning. On a grid node the stored entry is
    returned verbatim. No re-orthonormalization is performed unless
    explicitly requested (sensitivity studies only).
    """
    if not db.aligned:
        raise ContractError("cannot interpolate a raw (unaligned) database")
    if len(db) == 1:
        v, u = db.entries[0].matrix, db.entries[0].u_eq
        return (v.copy(), u.copy())
    x = _locate(db, float(x_c))
    grid = db.grid
    j = int(np.searchsorted(grid, x, side="right") - 1)
    j = min(max(j, 0), grid.size - 2)
    span = grid[j + 1] - grid[j]
    w = (x - grid[j]) / span
    if w == 0.0:
        v = db.entries[j].matrix.copy()
        u = db.entries[j].u_eq.copy()
    elif w == 1.0:
        v = db.entries[j + 1].matrix.copy()
        u = db.entries[j + 1].u_eq.copy()
    else:
        v = (1.0 - w) * db.entries[j].matrix + w * db.entries[j + 1].matrix
        u = (1.0 - w) * db.entries[j].u_eq + w * db.entries[j + 1].u_eq
    if reorthonormalize:
        q, r = np.linalg.qr(v)
        v = q * np.sign(np.diag(r))
    return v, u


def slow_basis_derivative(db, x_c, delta=None):
    """Central-difference derivative of the interpolated basis and
    equilibrium with respect to the pulse-center position.

    Inside a grid cell this equals the exact piecewise-constant slope of the
    linear interpolation. A single-entry database has zero derivative.
    """
    if len(db) == 1:
        e = db.entries[0]
        return np.zeros_like(e.matrix), np.zeros_like(e.u_eq)
    x = _locate(db, float(x_c))
    grid = db.grid
    if delta is None:
        j = int(np.searchsorted(grid, x, side="right") - 1)
        j = min(max(j, 0), grid.size - 2)
        delta = 0.5 * (grid[j + 1] - grid[j])
    lo = max(x - delta, grid[0])
    hi = min(x + delta, grid[-1])
    if hi <= lo:
        raise ContractError("degenerate derivative stencil")
    v_hi, u_hi = interpolate_basis(db, hi)
    v_lo, u_lo = interpolate_basis(db, lo)
    return (v_hi - v_lo) / (hi - lo), (u_hi - u_lo) / (hi - lo)


# ---------------------------------------------------------------------------
# stacked-basis compression (constant-basis baselines)
# ---------------------------------------------------------------------------

@dataclass
class StackedBasisMatrix:
    """Horizontal stack of local bases with their grid provenance."""

    matrix: np.ndarray
    sources: list

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def n_columns(self):
        return self.matrix.shape[1]


def stack_columns(bases) -> StackedBasisMatrix:
    """Stack local bases (or a database) into one wide matrix."""
    if isinstance(bases, BasisDatabase):
        entries = bases.entries
        sources = list(range(len(entries)))
    else:
        entries = list(bases)
        sources = list(range(len(entries)))
    if not entries:
        raise ContractError("nothing to stack")
    mats = [e.matrix if isinstance(e, LocalBasis) else np.asarray(e) for e in entries]
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != n:
            raise ContractError("stacked bases must share the row dimension")
    return StackedBasisMatrix(np.hstack(mats), sources)


def stack_orthonormalize(bases, sv_tol=DEFAULT_SV_TOL):
    """Orthonormal basis spanning the stacked columns ("Modal" baseline).

    Keeps the left singular vectors with singular value above
    ``sv_tol * sigma_1``; the threshold sits well above machine zero to drop
    spurious directions.
    """
    stacked = bases if isinstance(bases, StackedBasisMatrix) else stack_columns(bases)
    u, s, _ = np.linalg.svd(stacked.matrix, full_matrices=False)
    rank = int(np.sum(s > sv_tol * s[0]))
    log.info("stack of %d columns orthonormalized to rank %d", stacked.n_columns, rank)
    return u[:, :rank]


def modal_pod(stacked, m, sv_tol=DEFAULT_SV_TOL):
    """Best constant basis of size ``m``: top left singular vectors of the
    stacked matrix ("Modal-POD" baseline)."""
    stacked = stacked if isinstance(stacked, StackedBasisMatrix) else stack_columns(stacked)
    u, s, _ = np.linalg.svd(stacked.matrix, full_matrices=False)
    rank = int(np.sum(s > sv_tol * s[0]))
    if m > rank:
        raise ContractError(f"requested {m} modes but the stack has rank {rank}")
    return u[:, :m]


def singular_value_profile(stacked):
    """All singular values of the stacked matrix, descending."""
    stacked = stacked if isinstance(stacked, StackedBasisMatrix) else stack_columns(stacked)
    return np.linalg.svd(stacked.matrix, compute_uv=False)


# ---------------------------------------------------------------------------
# persistence: text metadata + Matrix Market entries, bit-exact round-trip
# ---------------------------------------------------------------------------

def _fmt(x):
    return np.format_float_scientific(x, precision=17)


def save_database(db, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [
        f"kind = {db.kind}",
        f"m = {db.m}",
        f"n = {db.n}",
        f"n_entries = {len(db)}",
        f"reference_index = {db.reference_index}",
        f"aligned = {int(db.aligned)}",
        "grid = " + " ".join(_fmt(g) for g in db.grid),
    ]
    if db.alignment_residuals is not None:
        lines.append("alignment_residuals = "
                     + " ".join(_fmt(r) for r in db.alignment_residuals))
    if db.adjacent_angles is not None:
        lines.append("adjacent_angles = "
                     + " ".join(_fmt(a) for a in db.adjacent_angles))
    (directory / "db_meta.txt").write_text("\n".join(lines) + "\n")
    for j, entry in enumerate(db.entries):
        edir = directory / f"entry_{j:02d}"
        edir.mkdir(exist_ok=True)
        mmwrite(str(edir / "basis.mtx"), entry.matrix, precision=17)
        mmwrite(str(edir / "u_eq.mtx"), entry.u_eq[:, None], precision=17)
        (edir / "frequencies.txt").write_text(
            "\n".join(_fmt(w) for w in entry.frequencies) + "\n"
        )


def load_database(directory) -> BasisDatabase:
    directory = Path(directory)
    meta_path = directory / "db_meta.txt"
    if not meta_path.exists():
        raise ContractError(f"{directory} does not contain a basis database")
    meta = {}
    for line in meta_path.read_text().splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    grid = np.array([float(t) for t in meta["grid"].split()])
    n_entries = int(meta["n_entries"])
    entries = []
    for j in range(n_entries):
        edir = directory / f"entry_{j:02d}"
        matrix = np.asarray(mmread(str(edir / "basis.mtx")))
        u_eq = np.asarray(mmread(str(edir / "u_eq.mtx"))).ravel()
        freqs = np.array([
            float(t) for t in (edir / "frequencies.txt").read_text().split()
        ])
        entries.append(LocalBasis(
            x_c=float(grid[j]), u_eq=u_eq, frequencies=freqs,
            matrix=matrix, kind=meta["kind"],
        ))
    residuals = None
    if "alignment_residuals" in meta:
        residuals = np.array([float(t) for t in meta["alignment_residuals"].split()])
    angles = None
    if "adjacent_angles" in meta:
        angles = np.array([float(t) for t in meta["adjacent_angles"].split()])
    return BasisDatabase(
        grid=grid,
        entries=entries,
        reference_index=int(meta["reference_index"]),
        kind=meta["kind"],
        aligned=bool(int(meta["aligned"])),
        alignment_residuals=residuals,
        adjacent_angles=angles,
    )
