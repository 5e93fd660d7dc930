"""Independent oracles used by the test suite.

Everything here deliberately avoids the code paths it checks: dimensions
come from the Freudenthal multiplicity recursion, densities from seeded
Monte-Carlo convolution sampling, pairings from tensor-grid quadrature,
and polytope membership from half-plane tests.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from momentloc.rational import vec


# -- Freudenthal weight multiplicities ----------------------------------------


def freudenthal_dim(rs, lam) -> int:
    """Dimension by summing Freudenthal multiplicities over the weight diagram."""
    lam = vec(lam)
    rho = rs.rho
    ip = rs.ip
    lam_rho_sq = ip(tuple(a + b for a, b in zip(lam, rho)),
                    tuple(a + b for a, b in zip(lam, rho)))
    simple = rs.simple_roots
    mult = {lam: 1}
    level = [lam]
    while level:
        nxt = set()
        for mu in level:
            for a in simple:
                nxt.add(tuple(x - y for x, y in zip(mu, a)))
        nxt = sorted(nxt)
        any_positive = False
        for mu in nxt:
            if mu in mult:
                continue
            mu_rho = tuple(a + b for a, b in zip(mu, rho))
            denom = lam_rho_sq - ip(mu_rho, mu_rho)
            if denom <= 0:
                mult[mu] = 0
                continue
            total = Fraction(0)
            for alpha in rs.positive_roots:
                k = 1
                while True:
                    shifted = tuple(x + k * y for x, y in zip(mu, alpha))
                    m = mult.get(shifted)
                    if m is None or m == 0:
                        # outside the known diagram; stop once we leave it
                        if shifted not in mult:
                            break
                        k += 1
                        continue
                    total += ip(shifted, alpha) * m
                    k += 1
            val = 2 * total / denom
            assert val.denominator == 1
            mult[mu] = int(val)
            if mult[mu] > 0:
                any_positive = True
        level = [mu for mu in nxt if mult.get(mu, 0) > 0]
        if not any_positive:
            break
    return sum(mult.values())


# -- Monte-Carlo convolution density ------------------------------------------


def mc_density(measure, x, h=0.04, n=400_000, seed=123):
    """Box-count density estimate with standard error, one term at a time."""
    x = np.array([float(v) for v in x])
    rank = measure.rank
    vol = (2.0 * h) ** rank
    total = 0.0
    var = 0.0
    for t in measure.terms:
        k = len(t.dirs)
        base = np.array([float(v) for v in t.base])
        rng = np.random.default_rng((seed, abs(hash((t.base, t.dirs))) % 100000))
        ts = rng.exponential(size=(n, k))
        pts = base[None, :] + ts @ np.array([[float(c) for c in d] for d in t.dirs])
        w = np.exp(ts.sum(axis=1)) * (np.abs(pts - x[None, :]).max(axis=1) <= h)
        vals = float(t.coeff) * w / vol
        total += vals.mean()
        var += vals.var(ddof=1) / n
    return total, math.sqrt(var)


# -- quadrature pairings -------------------------------------------------------


def quad_pair_1d(measure, h, lo=-60.0, hi=60.0):
    """<mu, h> for a rank-1 measure by exact piecewise polynomial x quad."""
    from scipy.integrate import quad

    from momentloc.measure import normal_form_1d

    nf = normal_form_1d(measure)
    total = sum(float(c) * h(float(p)) for p, c in nf.atoms)
    cuts = [lo, *[float(b) for b in nf.breakpoints], hi]
    for i, piece in enumerate(nf.pieces):
        if not piece:
            continue
        a, b = cuts[i], cuts[i + 1]

        def f(x, piece=piece):
            return sum(float(c) * x ** j for j, c in enumerate(piece)) * h(x)

        val, _ = quad(f, a, b, limit=200)
        total += val
    return total


def quad_pair_term_2d(coeff, base, dirs, h, npts=120, t_max=40.0):
    """coeff int_{[0,inf)^2} h(base + t1 v1 + t2 v2) dt by tensor Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    t = 0.5 * t_max * (nodes + 1.0)
    w = 0.5 * t_max * weights
    b = np.array([float(v) for v in base])
    v1 = np.array([float(c) for c in dirs[0]])
    v2 = np.array([float(c) for c in dirs[1]])
    pts = b[None, None, :] + t[:, None, None] * v1[None, None, :] \
        + t[None, :, None] * v2[None, None, :]
    vals = h(pts.reshape(-1, 2)).reshape(npts, npts)
    return float(coeff) * float(np.einsum("i,j,ij->", w, w, vals))


# -- polytopes and lattice enumerations ---------------------------------------


def point_in_triangle(p, verts) -> bool:
    """Strict interior test by exact half-plane signs."""
    p = vec(p)
    v = [vec(u) for u in verts]
    signs = []
    for i in range(3):
        a, b = v[i], v[(i + 1) % 3]
        cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        signs.append(cr)
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def brute_hn_types(r, d, bound):
    """Exhaustive enumeration over compositions and block degrees."""
    bound = Fraction(bound)
    results = set()

    def compositions(total):
        if total == 0:
            yield ()
            return
        for first in range(1, total + 1):
            for rest in compositions(total - first):
                yield (first, *rest)

    for comp in compositions(r):
        ranges = []
        for rj in comp:
            lo = int(math.ceil(-bound * rj))
            hi = int(math.floor(bound * rj))
            ranges.append(range(lo, hi + 1))

        def rec(i, acc, left):
            if i == len(comp):
                if left == 0:
                    slopes = [Fraction(dj, rj) for (rj, dj) in acc]
                    if all(slopes[j] > slopes[j + 1] for j in range(len(slopes) - 1)):
                        results.add(tuple(acc))
                return
            for dj in ranges[i]:
                rec(i + 1, acc + [(comp[i], dj)], left - dj)

        rec(0, [], d)
    return results


def weyl_closure_count(rs) -> int:
    """Order of the group generated by every root reflection (matrix closure)."""
    from momentloc.rational import matmul, identity

    gens = [rs.reflection(a) for a in rs.positive_roots]
    seen = {identity(rs.rank)}
    frontier = list(seen)
    while frontier:
        new = []
        for m in frontier:
            for g in gens:
                p = matmul(g, m)
                if p not in seen:
                    seen.add(p)
                    new.append(p)
        frontier = new
    return len(seen)
