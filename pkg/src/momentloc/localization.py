"""Duistermaat-Heckman measures by one-parameter localization.

Coadjoint-orbit measures are built from the fixed-point contributions
delta_{w lam} star (signed Heaviside rays), with rays oriented into the
chamber half-space and the compensating signs of the inverted Euler
class.  The overall normalization is pinned so the rank-1 case is the
weighted-projective-line formula (unit total mass).  Induction wraps a
Cartan-side measure with the pairing rule (Ind mu, h) = (mu, Vol * Res h).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .liecore import RootSystem, vol_poly
from .measure import (
    GaussianSpec,
    Measure,
    PairResult,
    QuadSpec,
    Term,
    add,
    antisymmetrize,
    convolve,
    directional_derivative,
    equal,
    lebesgue_line,
    make,
    pair_test,
    scale,
)
from .rational import Vec, det, vec, vneg, vscale, vsub


@dataclass(frozen=True)
class KInvariantMeasure:
    """K-invariant distribution represented by its Cartan-side data.

    Pairing with an invariant test function h is (base, Vol^K_T . Res h);
    two of these are equal iff the antisymmetrizations of their bases
    agree, since Vol^K_T is Weyl-anti-invariant while Res h is invariant.
    """

    rs: RootSystem
    base: Measure

    def pair(self, h, quad: QuadSpec = QuadSpec()) -> PairResult:
        vp = vol_poly(self.rs)
        if self.rs.rank == 1 and isinstance(h, GaussianSpec):
            c1 = vp(vec([1]))
            return pair_test(self.base, h, poly_weight=[Fraction(0), c1])
        gram = np.array([[float(x) for x in row] for row in self.rs.gram])
        roots = [np.array([float(x) for x in a]) for a in self.rs.positive_roots]
        denom = float(reduce(lambda x, y: x * y,
                             (self.rs.ip(a, self.rs.rho) for a in self.rs.positive_roots),
                             Fraction(1)))
        hf = h if callable(h) else GaussianSpec(tuple(h))

        def weighted(pts: np.ndarray) -> np.ndarray:
            w = np.ones(pts.shape[0])
            for a in roots:
                w = w * (pts @ (gram @ a))
            return w / denom * hf(pts)

        return pair_test(self.base, weighted, quad)

    def equal(self, other: "KInvariantMeasure") -> bool:
        return equal(antisymmetrize(self.base, self.rs),
                     antisymmetrize(other.base, other.rs))


@dataclass(frozen=True)
class StratumContribution:
    xi: Vec
    measure: object  # Measure or KInvariantMeasure


def induce(rs: RootSystem, mu: Measure) -> KInvariantMeasure:
    if rs.rank != mu.rank:
        raise ValueError("rank mismatch")
    return KInvariantMeasure(rs, mu)


def coadjoint_dh_T(rs: RootSystem, lam, chamber) -> Measure:
    """Abelian DH measure of the orbit through a dominant lam, unit mass.

    Each W/W_lam coset contributes the delta at w lam convolved with one
    oriented Heaviside ray per root pairing nontrivially with lam; rays
    point into the chamber half-space with the compensating sign.  The
    result is divided by the orbit volume so the rank-1 case reproduces
    the weighted-projective-line normalization.
    """
    lam = vec(lam)
    zeta = vec(chamber)
    if not rs.is_dominant(lam):
        raise ValueError("lambda must be dominant")
    if any(rs.ip(a, zeta) == 0 for a in rs.positive_roots):
        raise ValueError("chamber vector lies on a root hyperplane")
    active = [b for b in rs.positive_roots if rs.ip(b, lam) != 0]
    total = Measure(rs.rank, ())
    for w, eta in rs.weyl_orbit(lam):
        coeff = Fraction(1)
        dirs = []
        for b in active:
            v = vneg(w(b))
            s = 1 if rs.ip(v, zeta) > 0 else -1
            coeff *= s
            dirs.append(vscale(s, v))
        total = add(total, make(coeff, eta, dirs))
    mass = abs(reduce(lambda x, y: x * y,
                      (rs.ip(b, lam) / rs.ip(b, rs.rho) for b in active), Fraction(1)))
    return scale(1 / mass, total)


def weighted_p1_dh(a, b, chamber: str = "+") -> Measure:
    """The interval measure chi_[a,b]/(b-a) via either action chamber."""
    a, b = Fraction(a), Fraction(b)
    if a >= b:
        raise ValueError("need a < b")
    w = b - a
    if chamber == "+":
        return add(make(Fraction(1) / w, (a,), [(1,)]),
                   make(Fraction(-1) / w, (b,), [(1,)]))
    if chamber == "-":
        return add(make(Fraction(-1) / w, (a,), [(-1,)]),
                   make(Fraction(1) / w, (b,), [(-1,)]))
    raise ValueError("chamber must be '+' or '-'")


def normsq_strata_p1(a, b) -> list[StratumContribution]:
    """Norm-square stratum measures for the weighted projective line."""
    a, b = Fraction(a), Fraction(b)
    w = b - a
    if a < 0 < b:
        mu0 = scale(1 / w, lebesgue_line(1, (1,)))
        mua = scale(Fraction(-1) / w, make(1, (a,), [(-1,)]))
        mub = scale(Fraction(-1) / w, make(1, (b,), [(1,)]))
        return [StratumContribution((a,), mua),
                StratumContribution((Fraction(0),), mu0),
                StratumContribution((b,), mub)]
    if 0 < a < b:
        mua = scale(1 / w, make(1, (a,), [(1,)]))
        mub = scale(Fraction(-1) / w, make(1, (b,), [(1,)]))
        return [StratumContribution((a,), mua), StratumContribution((b,), mub)]
    raise ValueError("critical value at the origin boundary is unsupported (a=0 or b=0), "
                     "and a < b with a < 0 < b or 0 < a < b is required")


def stratum_sum(strata: Sequence[StratumContribution]) -> Measure:
    out = None
    for s in strata:
        m = s.measure.base if isinstance(s.measure, KInvariantMeasure) else s.measure
        out = m if out is None else add(out, m)
    return out


def abelian_to_nonabelian(rs: RootSystem, mu_T: Measure) -> KInvariantMeasure:
    """|W|^{-1} Ind( Eul(k/t) mu_T ): derivatives along all negative roots."""
    deriv = mu_T
    for alpha in rs.positive_roots:
        deriv = directional_derivative(deriv, vneg(alpha))
    return induce(rs, scale(Fraction(1, len(rs.weyl_elements)), deriv))


# -- polytope encodings ------------------------------------------------------


def polygon_char_measure(vertices: Sequence, density=Fraction(1),
                         polarization=(Fraction(1), Fraction(11, 10))) -> Measure:
    """Signed vertex-cone encoding of density * chi_P for a convex polygon.

    Lawrence-Varchenko: at each vertex the edge directions that pair
    negatively with the polarization covector are flipped, contributing a
    sign (-1)^{#flips}; the signed sum of the polarized vertex cones is
    chi_P almost everywhere.
    """
    verts = [vec(v) for v in vertices]
    verts = _ccw_order(verts)
    density = Fraction(density)
    xi = vec(polarization)
    n = len(verts)
    out = Measure(2, ())
    for i, v in enumerate(verts):
        e1 = vsub(verts[(i + 1) % n], v)
        e2 = vsub(verts[(i - 1) % n], v)
        sign = Fraction(1)
        dirs = []
        for e in (e1, e2):
            p = e[0] * xi[0] + e[1] * xi[1]
            if p == 0:
                raise ValueError("polarization covector not generic for this polygon")
            if p < 0:
                sign = -sign
                e = vneg(e)
            dirs.append(e)
        out = add(out, make(sign * density, v, dirs))
    return out


def cone_char_measure(apex, dirs, density=Fraction(1)) -> Measure:
    return make(Fraction(density), vec(apex), [vec(d) for d in dirs])


def _ccw_order(verts: list[Vec]) -> list[Vec]:
    cx = sum((v[0] for v in verts), Fraction(0)) / len(verts)
    cy = sum((v[1] for v in verts), Fraction(0)) / len(verts)
    import math

    return sorted(verts, key=lambda v: math.atan2(float(v[1] - cy), float(v[0] - cx)))


# -- the G2/P fixture --------------------------------------------------------


@dataclass(frozen=True)
class G2PFixture:
    rs: RootSystem
    abelian_terms: Measure
    expected: KInvariantMeasure
    normsq: tuple[StratumContribution, ...]
    mu_T: Measure
    cone_scale: Fraction


G2_BETAS = ((2, -1), (-1, 2), (1, 1), (3, 0), (0, 3))
_G2_CHAMBER = (Fraction(11, 10), Fraction(9, 10))


def g2_fixtures(chamber=_G2_CHAMBER) -> G2PFixture:
    """The SU(3)-on-G2/P fixture of the worked examples.

    abelian_terms is the six-term signed sum over the SU(3) Weyl group of
    delta_{w(omega1+omega2)} star (+-H_{+-3 w omega1}) star (+-H_{+-3 w omega2});
    expected is the induced constant-density measure on the triangle
    P = hull(omega1, omega2, omega1+omega2); normsq holds the two stratum
    contributions (chi_P - chi_Q at (omega1+omega2)/2 and chi_Q at
    omega1+omega2, Q the vertex cone).
    """
    rs = _a2()
    zeta = vec(chamber)
    mu = vec((1, 1))
    betas = [vec(b) for b in G2_BETAS]
    for w in rs.weyl_elements:
        for b in betas:
            if rs.ip(w(b), zeta) == 0:
                raise ValueError("chamber not generic for the G2 ray arrangement")

    mu_T = Measure(2, ())
    for w in rs.weyl_elements:
        coeff = Fraction(1)
        dirs = []
        for b in betas:
            v = vneg(w(b))
            s = 1 if rs.ip(v, zeta) > 0 else -1
            coeff *= s
            dirs.append(vscale(s, v))
        mu_T = add(mu_T, make(coeff, w(mu), dirs))

    abelian = Measure(2, ())
    for w in rs.weyl_elements:
        coeff = Fraction(w.sign)
        dirs = []
        for b in (vec((3, 0)), vec((0, 3))):
            wv = w(b)
            s = 1 if rs.ip(wv, zeta) > 0 else -1
            coeff *= s
            dirs.append(vscale(s, wv))
        abelian = add(abelian, make(coeff, w(mu), dirs))

    om1, om2 = vec((1, 0)), vec((0, 1))
    cone_scale = 1 / abs(det(((Fraction(3), Fraction(0)), (Fraction(0), Fraction(3)))))
    chi_p = polygon_char_measure([om1, om2, mu], density=cone_scale)
    chi_q = cone_char_measure(mu, [om1, om2], density=cone_scale)
    expected = induce(rs, chi_p)
    normsq = (
        StratumContribution(vscale(Fraction(1, 2), mu),
                            induce(rs, add(chi_p, scale(-1, chi_q)))),
        StratumContribution(mu, induce(rs, chi_q)),
    )
    return G2PFixture(rs=rs, abelian_terms=abelian, expected=expected,
                      normsq=normsq, mu_T=mu_T, cone_scale=cone_scale)


def _a2() -> RootSystem:
    from .liecore import build_root_system

    return build_root_system("A2", "basic")
