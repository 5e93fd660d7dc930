"""Trajectory integration on top of the jitted kernels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels as K
from .models import FlowSystem, p1_moment


@dataclass
class IntegratorConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    stop_grad: float = 1e-10
    dt0: float = 1e-3
    max_record: int = 65536


@dataclass
class Trajectory:
    system: FlowSystem
    times: np.ndarray
    states: np.ndarray
    f_values: np.ndarray
    grad_norms: np.ndarray
    charts: np.ndarray | None
    status: int
    config: IntegratorConfig
    stats: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == K.STATUS_CONVERGED

    @property
    def limit(self) -> np.ndarray | None:
        """Final state when the gradient stop or the Cauchy criterion held."""
        if self.converged:
            return self.states[-1]
        n = len(self.times)
        if n >= 3:
            t_span = self.times[-1] - self.times[0]
            win = self.times >= self.times[-1] - 0.1 * t_span
            drift = np.linalg.norm(self.states[win] - self.states[-1], axis=1).max()
            if drift < 100 * self.config.atol:
                return self.states[-1]
        return None

    @property
    def limit_chart(self) -> int:
        return 0 if self.charts is None else int(self.charts[-1])

    def check_monotone(self) -> None:
        tol = 10 * self.config.atol * (1.0 + np.abs(self.f_values)).max()
        diffs = np.diff(self.f_values)
        if diffs.size and diffs.max() > tol:
            raise AssertionError(f"f increased by {diffs.max()} along the trajectory")

    def moment_at_limit(self) -> float | None:
        if self.limit is None:
            return None
        if self.system.kind == "p1":
            return p1_moment(self.system, self.states[-1, 0], self.states[-1, 1],
                             self.limit_chart)
        if self.system.kind == "local":
            return float(np.linalg.norm(self.system.phi(self.states[-1])))
        return float(np.linalg.norm(self.states[-1]))

    def csv_rows(self) -> list[list[str]]:
        dim = self.states.shape[1]
        header = ["t"] + [f"y{i}" for i in range(dim)] + ["f", "grad_norm"]
        if self.charts is not None:
            header.append("chart")
        rows = [header]
        for i in range(len(self.times)):
            row = [f"{self.times[i]:.12g}"] + [f"{x:.12g}" for x in self.states[i]] \
                + [f"{self.f_values[i]:.16g}", f"{self.grad_norms[i]:.16g}"]
            if self.charts is not None:
                row.append(str(int(self.charts[i])))
            rows.append(row)
        return rows


def integrate(sys: FlowSystem, z0, t_end: float,
              config: IntegratorConfig | None = None,
              chart: int = 0) -> Trajectory:
    """Integrate dy/dt = -grad f from z0 with adaptive monotone steps.

    z0 is a real state vector: (Re z_1, Im z_1, ...) for local models,
    (Re w, Im w) for the projective line, plain coordinates for radial
    systems.  Raises on a nonpositive tolerance; a stiff step-size
    underflow is reported in status with the partial trajectory kept.
    """
    cfg = config or IntegratorConfig()
    if cfg.rtol <= 0 or cfg.atol <= 0:
        raise ValueError("tolerances must be positive")
    y0 = np.asarray(z0, dtype=float)

    if sys.kind == "p1":
        out = K.integrate_p1(float(sys.interval[0]), float(sys.interval[1]),
                             float(y0[0]), float(y0[1]), chart, float(t_end),
                             cfg.rtol, cfg.atol, cfg.stop_grad, cfg.dt0,
                             cfg.max_record)
        times, states, charts, fvals, gnorms, count, status = out
        traj = Trajectory(sys, times[:count].copy(), states[:count].copy(),
                          fvals[:count].copy(), gnorms[:count].copy(),
                          charts[:count].copy(), int(status), cfg,
                          stats={"steps_recorded": int(count)})
        traj.check_monotone()
        return traj

    if sys.kind == "local":
        kind = 0
        wts = sys.weights_array()
        shift = sys.shift_array()
        if y0.size != 2 * len(sys.weights):
            raise ValueError("state must have two real slots per complex coordinate")
    else:
        kind = 2
        wts = np.zeros((1, 1))
        shift = np.array([float(sys.degree)])

    out = K.integrate_vector_field(kind, wts, shift, y0, float(t_end),
                                   cfg.rtol, cfg.atol, cfg.stop_grad,
                                   cfg.dt0, cfg.max_record)
    times, states, fvals, gnorms, count, status = out
    traj = Trajectory(sys, times[:count].copy(), states[:count].copy(),
                      fvals[:count].copy(), gnorms[:count].copy(), None,
                      int(status), cfg, stats={"steps_recorded": int(count)})
    traj.check_monotone()
    return traj
