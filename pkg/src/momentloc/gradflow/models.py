"""Flow systems: local quadratic moment-map models, the projective line,
and radial power potentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..rational import Vec, vec


@dataclass(frozen=True)
class FlowSystem:
    """A gradient system dy/dt = -grad f with a named kind.

    kind "local": f = 1/2 ||Phi||^2 on C^n, Phi_a(z) = sum_j |z_j|^2 W[j,a] + c_a,
    flat metric, state (Re z_1, Im z_1, ...).
    kind "p1": the two-chart Fubini-Study flow for the weighted projective
    line with moment interval [a, b]; state (Re w, Im w) plus a chart flag.
    kind "radial": f = ||y||^d on R^m.
    """

    kind: str
    weights: tuple[tuple[int, ...], ...] = ()
    shift: Vec = ()
    interval: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    degree: int = 0
    dim: int = 0

    # -- float evaluators ---------------------------------------------------

    def weights_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)

    def shift_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.shift], dtype=float)

    def phi(self, y: np.ndarray) -> np.ndarray:
        if self.kind != "local":
            raise ValueError("phi is defined on local models")
        y = np.asarray(y, dtype=float)
        mods = y[0::2] ** 2 + y[1::2] ** 2
        return mods @ self.weights_array() + self.shift_array()

    def f(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        if self.kind == "local":
            p = self.phi(y)
            return 0.5 * float(p @ p)
        if self.kind == "radial":
            return float(np.sum(y * y)) ** (self.degree / 2.0)
        raise ValueError("use p1_moment/p1_f for the projective line")

    def grad(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kind == "local":
            p = self.phi(y)
            s = self.weights_array() @ p
            g = np.empty_like(y)
            g[0::2] = 2.0 * s * y[0::2]
            g[1::2] = 2.0 * s * y[1::2]
            return g
        if self.kind == "radial":
            r2 = float(np.sum(y * y))
            if r2 == 0.0:
                return np.zeros_like(y)
            return self.degree * r2 ** (self.degree / 2.0 - 1.0) * y
        raise ValueError("use the p1 integrator for the projective line")

    def is_critical(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        """Eq.-critf test: the vector field generated by Phi(y) vanishes at y."""
        if self.kind == "p1":
            wre, wim = y[0], y[1]
            r2 = wre * wre + wim * wim
            a, b = float(self.interval[0]), float(self.interval[1])
            phi = (a + b * r2) / (1 + r2)
            return abs(phi) * np.hypot(wre, wim) / (1 + r2) < tol or r2 < tol ** 2
        g = self.grad(np.asarray(y, dtype=float))
        return float(np.linalg.norm(g)) < tol

    # -- exact evaluators ----------------------------------------------------

    def f_exact(self, z_parts) -> Fraction:
        """Exact f at a rational point given as [(re, im), ...] (local kind)."""
        if self.kind != "local":
            raise ValueError("exact evaluation is for local models")
        mods = [Fraction(re) ** 2 + Fraction(im) ** 2 for re, im in z_parts]
        total = Fraction(0)
        k = len(self.shift)
        for a in range(k):
            pa = self.shift[a] + sum(m * w[a] for m, w in zip(mods, self.weights))
            total += pa * pa
        return total / 2


def build_local_model(weights, shift) -> FlowSystem:
    """Local Hamiltonian torus model with integral action weights.

    weights is an n x k integer matrix (one row per complex coordinate),
    shift the central offset of the quadratic moment map.
    """
    rows = tuple(tuple(int(w) for w in row) for row in weights)
    if not rows:
        raise ValueError("need at least one coordinate")
    k = len(rows[0])
    if any(len(r) != k for r in rows):
        raise ValueError("ragged weight matrix")
    if any(all(w == 0 for w in r) for r in rows):
        raise ValueError("zero weight row gives a trivial factor; drop the coordinate")
    sh = vec(shift)
    if len(sh) != k:
        raise ValueError("shift dimension must match the torus rank")
    return FlowSystem(kind="local", weights=rows, shift=sh)


def p1_system(a, b) -> FlowSystem:
    """Two-chart flow for the weighted projective line with moment image [a, b].

    This is the unit-sphere-level reduction of the linear model with
    weights (a, b) on C^2; chart 0 contains the pole with moment value a.
    """
    a, b = Fraction(a), Fraction(b)
    if a >= b:
        raise ValueError("need a < b")
    return FlowSystem(kind="p1", interval=(a, b))


def radial_power_system(degree: int, dim: int) -> FlowSystem:
    """f = ||y||^degree on R^dim (the homogeneous Lojasiewicz fixture)."""
    if degree < 2 or dim < 1:
        raise ValueError("need degree >= 2 and dim >= 1")
    return FlowSystem(kind="radial", degree=degree, dim=dim)


def p1_moment(sys: FlowSystem, wre: float, wim: float, chart: int) -> float:
    a, b = float(sys.interval[0]), float(sys.interval[1])
    r2 = wre * wre + wim * wim
    if chart == 0:
        return (a + b * r2) / (1.0 + r2)
    return (a * r2 + b) / (1.0 + r2)


def p1_chordal(w1, chart1, w2, chart2) -> float:
    """Chordal distance on the projective line between chart points."""
    z1 = complex(*w1)
    z2 = complex(*w2)
    if chart1 != chart2:
        if abs(z2) < 1e-300:
            return 1.0 / np.sqrt(1.0 + abs(z1) ** 2)
        z2 = 1.0 / z2
    num = abs(z1 - z2)
    den = np.sqrt((1.0 + abs(z1) ** 2) * (1.0 + abs(z2) ** 2))
    return float(num / den)
