"""Temperature-dependent equilibria, vibration modes and static modal
derivatives; builds the local reduction basis at one temperature
configuration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BasisRankError, ContractError, SolverError, UnstableConfigurationError

__all__ = [
    "LocalBasis",
    "solve_equilibrium",
    "vibration_modes",
    "modal_derivative",
    "build_local_basis",
]

log = logging.getLogger(__name__)

ORTHONORMALITY_TOL = 1e-10


@dataclass
class LocalBasis:
    """Orthonormal reduction basis attached to one temperature configuration.

    ``matrix`` has orthonormal columns spanning the vibration modes (and the
    modal derivatives for kind ``"vm+md"``); ``u_eq`` is the converged static
    equilibrium and ``frequencies`` the ascending circular frequencies of the
    retained modes.
    """

    x_c: float
    u_eq: np.ndarray
    frequencies: np.ndarray
    matrix: np.ndarray
    kind: str = "vm-only"
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    def validate(self):
        v = self.matrix
        gram_dev = np.linalg.norm(v.T @ v - np.eye(self.m))
        if gram_dev > ORTHONORMALITY_TOL:
            raise ContractError(f"basis columns not orthonormal, |V'V - I| = {gram_dev:.2e}")
        if np.any(self.frequencies <= 0.0):
            raise UnstableConfigurationError(
                f"non-positive frequency at x_c = {self.x_c!r}"
            )
        if np.any(np.diff(self.frequencies) < 0.0):
            raise ContractError("frequencies must be ascending")
        return self


def solve_equilibrium(model, x_c, u_guess=None, rtol=1e-9, max_iter=50, full_output=False):
    """Newton solve of ``f(u, x_c) = 0`` with the analytic tangent.

    Converged when ``|f|_2 <= rtol * (1 + |f(u_guess)|_2)``. Raises
    :class:`SolverError` carrying the residual history after ``max_iter``
    iterations. An indefinite tangent at the solution is reported as an
    unstable-equilibrium warning, not an error.
    """
    n = model.dof_count
    u = np.zeros(n) if u_guess is None else np.asarray(u_guess, dtype=float).copy()
    if u.shape != (n,):
        raise ContractError(f"u_guess has shape {u.shape}, expected ({n},)")

    f, k = model.force_and_tangent(u, x_c)
    res0 = np.linalg.norm(f)
    tol = rtol * (1.0 + res0)
    history = [res0]
    it = 0
    while history[-1] > tol:
        if it >= max_iter:
            raise SolverError(
                f"equilibrium Newton did not converge in {max_iter} iterations "
                f"at x_c = {x_c!r} (last residual {history[-1]:.3e})",
                residual_history=history,
            )
        du = np.linalg.solve(k, -f)
        u += du
        f, k = model.force_and_tangent(u, x_c)
        history.append(np.linalg.norm(f))
        it += 1

    stable = True
    try:
        np.linalg.cholesky(0.5 * (k + k.T))
    except np.linalg.LinAlgError:
        stable = False
        log.warning("indefinite tangent at equilibrium, x_c = %r: unstable equilibrium", x_c)
    if full_output:
        return u, {"residuals": np.array(history), "iterations": it, "stable": stable}
    return u


def _fix_signs(phi, reference=None):
    """Deterministic mode signs: largest-magnitude entry positive, or, with a
    reference mode set, continuity (non-negative inner product column-wise)."""
    for j in range(phi.shape[1]):
        col = phi[:, j]
        if reference is not None and j < reference.shape[1]:
            flip = col @ reference[:, j] < 0.0
        else:
            flip = col[np.argmax(np.abs(col))] < 0.0
        if flip:
            phi[:, j] = -col
    return phi


def vibration_modes(model, u_eq, x_c, k, method="dense", sign_reference=None):
    """Lowest-k mass-normalized modes of the tangent stiffness at ``u_eq``.

    Solves ``[K_t(u_eq, x_c) - omega^2 M] phi = 0`` and returns ascending
    circular frequencies with ``phi_i' M phi_j = delta_ij``. Sign convention:
    the largest-magnitude entry of each mode is positive, or continuity with
    ``sign_reference`` columns when given (used when sweeping a parameter
    grid). ``method`` is ``"dense"`` or ``"shift-invert"`` (ARPACK around
    zero); both must agree, which the test suite cross-checks.
    """
    n = model.dof_count
    if not 1 <= k <= n:
        raise ContractError(f"mode count {k} outside [1, {n}]")
    kt = model.tangent_stiffness(u_eq, x_c)
    m = model.mass()
    if method == "dense":
        vals, vecs = sla.eigh(kt, m, subset_by_index=(0, k - 1))
    elif method == "shift-invert":
        vals, vecs = spla.eigsh(sp.csc_matrix(kt), k=k, M=sp.csc_matrix(m), sigma=0.0)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        # ARPACK returns M-orthonormal vectors; re-normalize to be safe.
        for j in range(k):
            vecs[:, j] /= np.sqrt(vecs[:, j] @ m @ vecs[:, j])
    else:
        raise ContractError(f"unknown eigensolver method {method!r}")
    if vals[0] <= 0.0:
        raise UnstableConfigurationError(
            f"tangent stiffness not positive definite at x_c = {x_c!r} "
            f"(lowest eigenvalue {vals[0]:.3e})"
        )
    return np.sqrt(vals), _fix_signs(vecs, sign_reference)


def modal_derivative(model, u_eq, x_c, phi_i, phi_j, step_scale=1e-5):
    """Static sensitivity of mode ``phi_i`` to a perturbation along ``phi_j``.

    Solves ``K_t(u_eq) theta = -[dK_t/du . phi_j] phi_i`` where the
    directional derivative of the tangent is computed by central finite
    differences along ``phi_j`` with step
    ``h = step_scale * L / max(|phi_j|_inf, 1)``. Returns the raw
    (unnormalized) derivative; it vanishes identically for linear
    kinematics.
    """
    h = step_scale * model.characteristic_length / max(np.max(np.abs(phi_j)), 1.0)
    k_plus = model.tangent_stiffness(u_eq + h * phi_j, x_c)
    k_minus = model.tangent_stiffness(u_eq - h * phi_j, x_c)
    rhs = -((k_plus - k_minus) / (2.0 * h)) @ phi_i
    kt = model.tangent_stiffness(u_eq, x_c)
    try:
        return np.linalg.solve(kt, rhs)
    except np.linalg.LinAlgError as exc:
        raise UnstableConfigurationError(
            f"singular tangent stiffness at x_c = {x_c!r}"
        ) from exc


def build_local_basis(model, x_c, k, with_md=False, u_guess=None, rank_tol=1e-10,
                      sign_reference=None):
    """Assemble and orthonormalize the local basis at one configuration.

    Stacks the ``k`` lowest modes (and, with ``with_md``, all
    ``k*(k+1)/2`` distinct modal derivatives for ``i <= j``), scales each
    column to unit norm and orthonormalizes, preserving the span exactly.
    Orthonormalization is a QR factorization in the fixed column order
    [modes, derivatives]: unlike an SVD it does not remix the columns, so a
    family of bases built over a parameter grid (with ``sign_reference``
    chaining the mode signs) stays column-wise continuous and can be
    aligned and interpolated. Raises :class:`BasisRankError` naming the
    dependent columns if the stack is rank deficient.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    u_eq = solve_equilibrium(model, x_c, u_guess=u_guess)
    omegas, phi = vibration_modes(model, u_eq, x_c, k, sign_reference=sign_reference)

    columns = [phi]
    labels = [f"vm{i + 1}" for i in range(k)]
    kind = "vm-only"
    if with_md:
        kind = "vm+md"
        mds = []
        for i in range(k):
            for j in range(i, k):
                mds.append(modal_derivative(model, u_eq, x_c, phi[:, i], phi[:, j]))
                labels.append(f"md{i + 1}{j + 1}")
        columns.append(np.column_stack(mds))
    raw = np.column_stack(columns)

    norms = np.linalg.norm(raw, axis=0)
    if np.any(norms == 0.0):
        dead = [labels[i] for i in np.flatnonzero(norms == 0.0)]
        raise BasisRankError(f"zero columns in the local basis: {dead}", dead)
    scaled = raw / norms
    q, r = np.linalg.qr(scaled)
    diag = np.diagonal(r)
    dependent = np.flatnonzero(np.abs(diag) <= rank_tol)
    if dependent.size:
        names = [labels[i] for i in dependent]
        raise BasisRankError(
            f"rank-deficient local basis at x_c = {x_c!r}; dependent columns {names}",
            names,
        )
    # deterministic orientation: positive R diagonal
    q = q * np.sign(diag)
    basis = LocalBasis(
        x_c=float(x_c),
        u_eq=u_eq,
        frequencies=omegas,
        matrix=q,
        kind=kind,
        info={"column_labels": labels, "r_diagonal": diag.copy(), "modes": phi},
    )
    return basis.validate()
