"""Kirwan-Ness basin classification for the projective-line flow."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from .integrate import IntegratorConfig
from .models import FlowSystem, p1_chordal


@dataclass(frozen=True)
class BasinReport:
    fractions: dict
    counts: dict
    unconverged: int
    max_abs_phi_generic: float
    continuity: tuple[tuple[float, float], ...]  # (delta, limit modulus)
    samples: int

    def observed_xi(self) -> tuple:
        return tuple(k for k, v in self.counts.items() if v > 0)


def _sphere_starts(n: int, seed: int, pole_gap: float = 1e-2):
    """Uniform starts on the sphere, bounded away from both poles.

    Uses the area-uniform height variable; points with |w| or |1/w| below
    pole_gap are rejected.
    """
    rng = np.random.default_rng(seed)
    out = np.empty((n, 2))
    charts = np.zeros(n, dtype=np.int8)
    got = 0
    while got < n:
        u = rng.uniform(-1.0, 1.0)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        # |w|^2 = (1+u)/(1-u) for the area-uniform height u
        r2 = (1.0 + u) / (1.0 - u) if u < 1.0 else math.inf
        r = math.sqrt(r2)
        chart = 0
        if r > 1.0:
            r = 1.0 / r
            chart = 1
        if r < pole_gap:
            continue
        out[got, 0] = r * math.cos(phase)
        out[got, 1] = r * math.sin(phase)
        charts[got] = chart
        got += 1
    return out, charts


def _run_ensemble(sys: FlowSystem, starts, charts, t_end, cfg: IntegratorConfig):
    a, b = float(sys.interval[0]), float(sys.interval[1])
    if K.HAVE_NUMBA:
        return K.p1_ensemble_scalar(a, b, starts, charts, t_end, cfg.rtol,
                                    cfg.atol, cfg.stop_grad, cfg.dt0)
    return K.p1_ensemble_batched(a, b, starts, charts, t_end, cfg.rtol,
                                 cfg.atol, cfg.stop_grad, cfg.dt0)


def basin_classify(sys: FlowSystem, samples: int, seed: int,
                   t_end: float = 200.0,
                   config: IntegratorConfig | None = None,
                   continuity_deltas=(1e-1, 1e-2, 1e-3, 1e-4),
                   include_poles: bool = True) -> BasinReport:
    """Classify seeded starts by the critical value of their flow limit.

    Each limit is labelled by the nearest critical moment value among
    {a, 0, b} (or {a, b} when 0 is outside the moment interval).  The
    continuity diagnostic integrates pairs of starts at distance delta
    within the generic stratum and reports the largest chordal distance
    between their limits, for each delta.
    """
    if sys.kind != "p1":
        raise ValueError("basin classification runs on the projective-line flow")
    # near the zero level the moment value sits below the integrator's
    # w-space noise floor (rtol * |w|), so the gradient stop must stay above
    # that floor; 1e-8 still pins |Phi(limit)| two orders below the 1e-6 check
    cfg = config or IntegratorConfig(stop_grad=1e-8)
    a, b = float(sys.interval[0]), float(sys.interval[1])
    crit_values = [a, 0.0, b] if a < 0.0 < b else [a, b]

    starts, charts = _sphere_starts(samples, seed)
    out, chart_f, _, status, _ = _run_ensemble(sys, starts, charts, t_end, cfg)

    counts = {v: 0 for v in crit_values}
    unconverged = 0
    max_phi = 0.0
    for i in range(samples):
        if status[i] != K.STATUS_CONVERGED:
            unconverged += 1
            continue
        phi = out[i, 2]
        label = min(crit_values, key=lambda v: abs(phi - v))
        counts[label] += 1
        if label == 0.0:
            max_phi = max(max_phi, abs(phi))

    if include_poles:
        pole_starts = np.array([[0.0, 0.0], [0.0, 0.0]])
        pole_charts = np.array([0, 1], dtype=np.int8)
        pout, _, _, pstat, _ = _run_ensemble(sys, pole_starts, pole_charts, t_end, cfg)
        for i, lab in enumerate((a, b)):
            if pstat[i] == K.STATUS_CONVERGED:
                counts[lab] += 1

    total = sum(counts.values()) + unconverged
    fractions = {k: v / total for k, v in counts.items()}

    continuity = []
    n_pairs = 24
    base, base_charts = _sphere_starts(n_pairs, seed + 1)
    for delta in continuity_deltas:
        pert = base.copy()
        pert[:, 0] += delta * base[:, 1] / np.hypot(base[:, 0], base[:, 1])
        pert[:, 1] -= delta * base[:, 0] / np.hypot(base[:, 0], base[:, 1])
        o1, c1, _, s1, _ = _run_ensemble(sys, base, base_charts, t_end, cfg)
        o2, c2, _, s2, _ = _run_ensemble(sys, pert, base_charts, t_end, cfg)
        ok = (s1 == K.STATUS_CONVERGED) & (s2 == K.STATUS_CONVERGED)
        dists = [p1_chordal(o1[i, :2], int(c1[i]), o2[i, :2], int(c2[i]))
                 for i in range(n_pairs) if ok[i]]
        continuity.append((float(delta), float(max(dists)) if dists else math.nan))

    return BasinReport(fractions=fractions, counts=counts, unconverged=unconverged,
                       max_abs_phi_generic=max_phi,
                       continuity=tuple(sorted(continuity)), samples=samples)
