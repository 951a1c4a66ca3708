"""Implicit Newmark (average acceleration) time integration with a Newton
solve per step; dimension-agnostic, so full and reduced systems share it.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, IntegrationError
from .models import Trajectory

__all__ = ["NewmarkSettings", "TransientSystem", "newmark_integrate"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewmarkSettings:
    """Average-acceleration defaults; ``2*beta >= gamma >= 1/2`` is required
    for unconditional stability and is enforced at construction."""

    beta: float = 0.25
    gamma: float = 0.5
    newton_tol: float = 1e-8
    # Secondary acceptance: relative displacement increment. Residual
    # round-off from large internal forces can sit above newton_tol times a
    # quiet step's predictor residual; a stagnated machine-precision update
    # is then accepted on the increment.
    newton_utol: float = 1e-12
    max_newton: int = 25
    growth_limit: float = 1e6

    def __post_init__(self):
        if not (2.0 * self.beta >= self.gamma >= 0.5):
            raise ContractError(
                f"unstable Newmark parameters beta={self.beta}, gamma={self.gamma}"
            )
        if self.max_newton < 1:
            raise ContractError("max_newton must be >= 1")


class TransientSystem(ABC):
    """Residual/tangent provider for the integrator.

    ``begin_step`` lets slowly-varying systems freeze their state (reduction
    basis, origin) for one step; the default is a no-op. The residual is
    ``M a + C v + f(u) - g(t)`` in whatever coordinates the system lives in.
    """

    @property
    @abstractmethod
    def ndof(self) -> int: ...

    def begin_step(self, t_start: float, t_end: float) -> None:
        return None

    @abstractmethod
    def mass(self) -> np.ndarray: ...

    @abstractmethod
    def residual(self, u, v, a, t) -> np.ndarray: ...

    @abstractmethod
    def iteration_matrix(self, u, v, a, t, c_acc, c_vel) -> np.ndarray:
        """Effective tangent ``c_acc*M + c_vel*C + K_t(u)``."""


def newmark_integrate(system, u0, v0, dt, n_steps, settings=None,
                      coordinate_space="full", metadata=None):
    """Integrate ``n_steps`` implicit Newmark steps from ``(u0, v0)``.

    The initial acceleration is solved consistently from the residual at
    ``t = 0``. Each step runs Newton-Raphson on the end-of-step displacement
    until the residual drops below ``newton_tol`` relative to the step's
    predictor residual. Blow-up beyond ``growth_limit`` times the initial
    response scale aborts with :class:`IntegrationError`. Returns a
    :class:`Trajectory` including per-step converged residual norms.
    """
    settings = settings or NewmarkSettings()
    dt = float(dt)
    if dt <= 0.0 or n_steps < 1:
        raise ContractError("need dt > 0 and n_steps >= 1")
    n = system.ndof
    u = np.asarray(u0, dtype=float).copy()
    v = np.asarray(v0, dtype=float).copy()
    if u.shape != (n,) or v.shape != (n,):
        raise ContractError(f"initial state must have shape ({n},)")

    times = dt * np.arange(n_steps + 1)
    hist_u = np.empty((n_steps + 1, n))
    hist_v = np.empty((n_steps + 1, n))
    hist_a = np.empty((n_steps + 1, n))
    step_residuals = np.zeros(n_steps + 1)

    system.begin_step(0.0, 0.0)
    rhs0 = -system.residual(u, v, np.zeros(n), 0.0)
    a = np.linalg.solve(system.mass(), rhs0)
    hist_u[0], hist_v[0], hist_a[0] = u, v, a

    beta, gamma = settings.beta, settings.gamma
    c_acc = 1.0 / (beta * dt * dt)
    c_vel = gamma / (beta * dt)
    max_newton_used = 0
    # Response scale for blow-up detection is established over a short
    # warmup window (zero initial conditions start at amplitude zero).
    warmup = min(100, n_steps)
    ref_amp = max(np.linalg.norm(u), 1e-300)

    for step in range(1, n_steps + 1):
        t1 = times[step]
        system.begin_step(times[step - 1], t1)

        u_pred = u + dt * v + dt * dt * (0.5 - beta) * a
        v_pred = v + dt * (1.0 - gamma) * a
        u1 = u_pred.copy()
        a1 = np.zeros(n)
        v1 = v_pred.copy()

        r = system.residual(u1, v1, a1, t1)
        r_ref = np.linalg.norm(r)
        res_hist = [r_ref]
        iters = 0
        while res_hist[-1] > settings.newton_tol * r_ref and r_ref > 0.0:
            if iters >= settings.max_newton:
                raise IntegrationError(
                    f"Newton stalled at step {step} (t = {t1:.6g}), residual "
                    f"{res_hist[-1]:.3e}",
                    step=step, time=t1, residual_history=res_hist,
                )
            s_mat = system.iteration_matrix(u1, v1, a1, t1, c_acc, c_vel)
            du = np.linalg.solve(s_mat, -r)
            u1 += du
            a1 = c_acc * (u1 - u_pred)
            v1 = v_pred + gamma * dt * a1
            r = system.residual(u1, v1, a1, t1)
            res_hist.append(np.linalg.norm(r))
            iters += 1
            if np.linalg.norm(du) <= settings.newton_utol * (1.0 + np.linalg.norm(u1)):
                break
        max_newton_used = max(max_newton_used, iters)
        step_residuals[step] = res_hist[-1]

        u, v, a = u1, v1, a1
        hist_u[step], hist_v[step], hist_a[step] = u, v, a
        amp = np.linalg.norm(u)
        if step <= warmup:
            ref_amp = max(ref_amp, amp)
        elif settings.growth_limit and amp > settings.growth_limit * ref_amp:
            raise IntegrationError(
                f"response grew beyond {settings.growth_limit:.1e} times the "
                f"initial scale at step {step} (t = {t1:.6g})",
                step=step, time=t1,
            )

    meta = dict(metadata or {})
    meta.setdefault("dt", dt)
    meta["max_newton_iterations"] = max_newton_used
    meta["max_step_residual"] = float(step_residuals.max())
    return Trajectory(
        times=times,
        displacement=hist_u,
        velocity=hist_v,
        acceleration=hist_a,
        coordinate_space=coordinate_space,
        metadata=meta,
        step_residuals=step_residuals,
    )
