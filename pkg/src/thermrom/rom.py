"""Reduced and full transient systems: the leading-order adaptive-basis
model, its first-order slow-time correction, constant-basis Galerkin
baselines, and solution reconstruction.

The slow phase ``tau`` enters through two scenario-supplied maps: the pulse
center ``x_c(tau)`` and ``tau(t) = eps * nu * t`` with ``nu`` the fast
(forcing) rate. Within one integrator step the basis, origin and reduced
operators are frozen at the step-midpoint phase, which keeps the
second-order accuracy of the integrator in the fast time while the basis
drifts at the slow rate. The correction system is linear in its unknowns
with the right-hand side

    V' * [dp/deps - 2*nu*M*dV/dtau*q0' - c*nu*C*(du_eq/dtau + dV/dtau*q0)]

where ``c`` is ``damping_cross_factor`` (1 by the chain rule; 2 matches an
alternative bookkeeping of the cross term and is kept as a flag) and the
equilibrium drift term ``du_eq/dtau`` can be disabled with
``include_equilibrium_drift=False`` for comparison studies.
"""

from __future__ import annotations

import logging

import numpy as np

from .basisdb import interpolate_basis, slow_basis_derivative
from .newmark import TransientSystem

__all__ = [
    "BasisSource",
    "InterpolatedBasisSource",
    "ConstantBasisSource",
    "FullSystem",
    "AdaptiveRom",
    "CorrectionRom",
    "ConstantBasisRom",
    "reconstruct",
]

log = logging.getLogger(__name__)


def reconstruct(u_eq, basis, q0, q1=None, eps=0.0):
    """Full-space displacement ``u_eq + V*(q0 + eps*q1)``."""
    q = np.asarray(q0, dtype=float)
    if q1 is not None and eps != 0.0:
        q = q + eps * np.asarray(q1, dtype=float)
    return np.asarray(u_eq) + np.asarray(basis) @ q


class BasisSource:
    """Provides (V, u_eq) and their slow derivatives at a pulse position."""

    def basis_at(self, x_c):
        raise NotImplementedError

    def derivative_at(self, x_c):
        raise NotImplementedError


class InterpolatedBasisSource(BasisSource):
    def __init__(self, database, derivative_delta=None):
        self.database = database
        self.derivative_delta = derivative_delta

    def basis_at(self, x_c):
        return interpolate_basis(self.database, x_c)

    def derivative_at(self, x_c):
        return slow_basis_derivative(self.database, x_c,
                                     delta=self.derivative_delta)


class ConstantBasisSource(BasisSource):
    def __init__(self, basis, u_ref=None):
        self.basis = np.asarray(basis, dtype=float)
        self.u_ref = (np.zeros(self.basis.shape[0]) if u_ref is None
                      else np.asarray(u_ref, dtype=float))

    def basis_at(self, x_c):
        return self.basis, self.u_ref

    def derivative_at(self, x_c):
        return np.zeros_like(self.basis), np.zeros_like(self.u_ref)


class FullSystem(TransientSystem):
    """Unreduced equations of motion of a second-order model.

    ``theta_of_t`` maps time to the temperature parameter (None for a cold
    model), ``load`` is the applied force ``g(t)``. Works for the beam and
    the two-mass oscillator alike; temperature-following damping is handled
    through ``model.damping(theta)``.
    """

    def __init__(self, model, theta_of_t=None, load=None, temperature_damping=False):
        self.model = model
        self.theta_of_t = theta_of_t or (lambda t: None)
        self.load = load or (lambda t: np.zeros(model.dof_count))
        self.temperature_damping = temperature_damping
        self._mass = model.mass()
        if not temperature_damping:
            self._damping = model.damping()

    @property
    def ndof(self):
        return self.model.dof_count

    def mass(self):
        return self._mass

    def _damping_at(self, theta):
        return self.model.damping(theta) if self.temperature_damping else self._damping

    def residual(self, u, v, a, t):
        theta = self.theta_of_t(t)
        return (self._mass @ a + self._damping_at(theta) @ v
                + self.model.internal_force(u, theta) - self.load(t))

    def iteration_matrix(self, u, v, a, t, c_acc, c_vel):
        theta = self.theta_of_t(t)
        return (c_acc * self._mass + c_vel * self._damping_at(theta)
                + self.model.tangent_stiffness(u, theta))


class _ReducedBase(TransientSystem):
    """Shared reduced-operator plumbing (frozen-basis caches)."""

    def __init__(self, model, source):
        self.model = model
        self.source = source
        self._v = None
        self._u_org = None
        self._m_red = None
        self._c_red = None

    @property
    def ndof(self):
        return self._v.shape[1]

    def mass(self):
        return self._m_red

    def _freeze(self, x_c):
        v, u_org = self.source.basis_at(x_c)
        self._v = v
        self._u_org = u_org
        self._m_red = v.T @ self.model.mass() @ v
        self._c_red = v.T @ self.model.damping() @ v
        # The reduced mass must stay positive definite for any frozen basis.
        np.linalg.cholesky(self._m_red)


class AdaptiveRom(_ReducedBase):
    """Leading-order Galerkin model on the slowly adapting basis.

    Residual at frozen slow phase ``tau``:

        V' M V q0'' + V' C V q0' + V' f(u_eq + V q0, x_c(tau)) - V' p(t)

    where ``p`` is the leading-order part of the applied load. With a
    constant source and a fixed pulse this reduces to a standard
    fixed-basis model.
    """

    def __init__(self, model, source, tau_of_t, xc_of_tau, load=None):
        super().__init__(model, source)
        self.tau_of_t = tau_of_t
        self.xc_of_tau = xc_of_tau
        self.load = load or (lambda t: np.zeros(model.dof_count))
        self._x_c = None
        self.set_slow_time(0.0)

    def set_slow_time(self, t):
        tau = self.tau_of_t(t)
        self._x_c = self.xc_of_tau(tau)
        self._freeze(self._x_c)

    def begin_step(self, t_start, t_end):
        self.set_slow_time(0.5 * (t_start + t_end))

    @property
    def frozen_state(self):
        return self._v, self._u_org, self._x_c

    def residual(self, q, qd, qdd, t):
        f = self.model.internal_force(self._u_org + self._v @ q, self._x_c)
        return (self._m_red @ qdd + self._c_red @ qd
                + self._v.T @ (f - self.load(t)))

    def iteration_matrix(self, q, qd, qdd, t, c_acc, c_vel):
        kt = self.model.tangent_stiffness(self._u_org + self._v @ q, self._x_c)
        return (c_acc * self._m_red + c_vel * self._c_red
                + self._v.T @ kt @ self._v)


class ConstantBasisRom(_ReducedBase):
    """Fixed-basis Galerkin model about a fixed origin.

    Projects the original equations onto ``V`` with the full applied load
    ``g(t)``; the thermal load enters as forcing through
    ``f(u_ref + V q, theta(t))``. No slow-phase freezing: the temperature
    parameter is evaluated at the exact residual time.
    """

    def __init__(self, model, basis, theta_of_t=None, load=None, u_ref=None):
        source = ConstantBasisSource(basis, u_ref)
        super().__init__(model, source)
        self.theta_of_t = theta_of_t or (lambda t: None)
        self.load = load or (lambda t: np.zeros(model.dof_count))
        self._freeze(None)

    def residual(self, q, qd, qdd, t):
        theta = self.theta_of_t(t)
        f = self.model.internal_force(self._u_org + self._v @ q, theta)
        return (self._m_red @ qdd + self._c_red @ qd
                + self._v.T @ (f - self.load(t)))

    def iteration_matrix(self, q, qd, qdd, t, c_acc, c_vel):
        theta = self.theta_of_t(t)
        kt = self.model.tangent_stiffness(self._u_org + self._v @ q, theta)
        return (c_acc * self._m_red + c_vel * self._c_red
                + self._v.T @ kt @ self._v)

    @property
    def basis(self):
        return self._v


class CorrectionRom(_ReducedBase):
    """First-order slow-time correction, linear in its unknowns ``q1``.

    Needs the leading-order solution through ``q0_of_t(t) -> (q0, q0dot)``
    and the analytic epsilon-derivative of the load ``eps_load(t)``. The
    stiffness is the tangent at the reconstructed leading-order state, so
    the operators are time dependent but state independent; initial
    conditions are identically zero.
    """

    def __init__(self, model, source, tau_of_t, xc_of_tau, q0_of_t,
                 nu, eps_load=None, dxc_dtau=None,
                 damping_cross_factor=1.0, include_equilibrium_drift=True):
        super().__init__(model, source)
        self.tau_of_t = tau_of_t
        self.xc_of_tau = xc_of_tau
        self.q0_of_t = q0_of_t
        self.nu = float(nu)
        self.eps_load = eps_load or (lambda t: np.zeros(model.dof_count))
        self.dxc_dtau = dxc_dtau or (lambda tau: 0.0)
        self.damping_cross_factor = float(damping_cross_factor)
        self.include_equilibrium_drift = bool(include_equilibrium_drift)
        self._x_c = None
        self._tau = None
        self._v_slow = None
        self._u_org_slow = None
        self.set_slow_time(0.0)

    def set_slow_time(self, t):
        tau = self.tau_of_t(t)
        self._tau = tau
        self._x_c = self.xc_of_tau(tau)
        self._freeze(self._x_c)
        dv_dxc, du_dxc = self.source.derivative_at(self._x_c)
        rate = self.dxc_dtau(tau)
        self._v_slow = dv_dxc * rate
        self._u_org_slow = du_dxc * rate
        self._tangent_cache = (None, None)
        self._rhs_cache = (None, None)

    def begin_step(self, t_start, t_end):
        self.set_slow_time(0.5 * (t_start + t_end))

    def leading_state(self, t):
        q0, _ = self.q0_of_t(t)
        return self._u_org + self._v @ q0

    def rhs(self, t):
        """Projected slow-coupling force driving the correction."""
        if self._rhs_cache[0] == t:
            return self._rhs_cache[1]
        q0, q0d = self.q0_of_t(t)
        m = self.model.mass()
        c = self.model.damping()
        force = self.eps_load(t) - 2.0 * self.nu * (m @ (self._v_slow @ q0d))
        u_slow = self._v_slow @ q0
        if self.include_equilibrium_drift:
            u_slow = u_slow + self._u_org_slow
        force = force - self.damping_cross_factor * self.nu * (c @ u_slow)
        out = self._v.T @ force
        self._rhs_cache = (t, out)
        return out

    def tangent(self, t):
        """Reduced tangent stiffness at the leading-order state."""
        if self._tangent_cache[0] == t:
            return self._tangent_cache[1]
        kt = self.model.tangent_stiffness(self.leading_state(t), self._x_c)
        out = self._v.T @ kt @ self._v
        self._tangent_cache = (t, out)
        return out

    def residual(self, q1, q1d, q1dd, t):
        return (self._m_red @ q1dd + self._c_red @ q1d
                + self.tangent(t) @ q1 - self.rhs(t))

    def iteration_matrix(self, q1, q1d, q1dd, t, c_acc, c_vel):
        return c_acc * self._m_red + c_vel * self._c_red + self.tangent(t)
