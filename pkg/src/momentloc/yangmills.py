"""2d Yang-Mills partition sums, Witten volumes, and the rank-1 strata.

The partition function is the weight-lattice sum Vol(K)^{2g} *
sum_nu (dim V_nu)^{2-2g} exp(-eps ||nu+rho||^2 / 2) over dominant nu,
truncated at a norm cutoff with a rigorous Gaussian tail bound.  The
genus-one SU(2) stratum measures live in the exact measure algebra and
their pairing against a Gaussian reproduces the lattice sum by Poisson
summation (the sawtooth identity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .liecore import RootSystem, build_root_system
from .measure import GaussianSpec, Measure, add, make, pair_test, scale
from .rational import Vec, vec


@dataclass(frozen=True)
class PartitionSpec:
    rs: RootSystem
    genus: int
    epsilon: Fraction
    cutoff: float

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")


@dataclass(frozen=True)
class LatticeSum:
    value: float
    tail_bound: float
    terms_used: int


@dataclass(frozen=True)
class MigdalResult:
    value: float
    tail_bound: float
    terms_used: int
    sum_part: float
    vol_factor: float

    @property
    def sum_tail_bound(self) -> float:
        return self.tail_bound / self.vol_factor if self.vol_factor else math.inf


def _weight_matrix(rs: RootSystem) -> np.ndarray:
    """Columns are the fundamental weights (floats)."""
    return np.array([[float(x) for x in fw] for fw in rs.fundamental_weights]).T


def _gram_float(rs: RootSystem) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rs.gram])


def dominant_shifted_lattice(rs: RootSystem, cutoff: float):
    """All nu + rho with nu a dominant lattice weight and norm <= cutoff.

    Returns (normsq, dims) as float arrays sorted by (normsq, coefficients),
    giving a fixed deterministic summation order.
    """
    fw = rs.fundamental_weights
    gram_w = np.array([[float(rs.ip(a, b)) for b in fw] for a in fw])
    bounds = [int(math.floor(cutoff / math.sqrt(gram_w[i, i]))) for i in range(rs.rank)]
    roots_on_fw = np.array([[float(rs.ip(a, w)) for w in fw] for a in rs.positive_roots])
    rho_prods = np.array([float(rs.ip(a, rs.rho)) for a in rs.positive_roots])
    if rs.rank == 1:
        m = np.arange(1, bounds[0] + 1, dtype=float)[:, None]
    else:
        m1 = np.arange(1, bounds[0] + 1)
        m2 = np.arange(1, bounds[1] + 1)
        a, b = np.meshgrid(m1, m2, indexing="ij")
        m = np.stack([a.ravel(), b.ravel()], axis=1).astype(float)
    normsq = np.einsum("ni,ij,nj->n", m, gram_w, m)
    keep = normsq <= cutoff * cutoff + 1e-9
    m = m[keep]
    normsq = normsq[keep]
    dims = np.prod(m @ roots_on_fw.T / rho_prods, axis=1)
    order = np.lexsort(tuple(m.T[::-1]) + (normsq,))
    return normsq[order], dims[order]


def _min_eig_lower_bound(rs: RootSystem) -> float:
    """Rational lower bound for the smallest eigenvalue of the fw Gram."""
    fw = rs.fundamental_weights
    g = [[rs.ip(a, b) for b in fw] for a in fw]
    if rs.rank == 1:
        return float(g[0][0])
    tr = g[0][0] + g[1][1]
    d = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    return float(d / tr)


def _dim_growth_constant(rs: RootSystem) -> float:
    """C with dim V_nu <= C ||nu+rho||^p, p = #positive roots (Cauchy-Schwarz)."""
    c = 1.0
    for a in rs.positive_roots:
        c *= math.sqrt(float(rs.ip(a, a))) / float(rs.ip(a, rs.rho))
    return c


def _migdal_tail(rs: RootSystem, genus: int, eps: float, cutoff: float) -> float:
    """Upper bound for the dropped Gaussian terms beyond the cutoff."""
    lam = _min_eig_lower_bound(rs)
    root_lam = math.sqrt(lam)
    p = len(rs.positive_roots) * max(0, 2 - 2 * genus)
    c = _dim_growth_constant(rs) ** max(0, 2 - 2 * genus)
    kmin = max(1, int(math.floor(cutoff / root_lam)))

    def shell_count(k: int) -> float:
        return 1.0 if rs.rank == 1 else 3.0 * k

    total = 0.0
    k = kmin
    while True:
        r = root_lam * k
        term = shell_count(k) * c * r ** p * math.exp(-eps * r * r / 2.0)
        total += term
        k += 1
        if term < 1e-300 or (term < 1e-18 * max(total, 1e-300) and k > kmin + 10):
            break
        if k > kmin + 100_000:
            raise RuntimeError("tail bound failed to converge")
    return total


def migdal_partition(spec: PartitionSpec) -> MigdalResult:
    """Partition sum with a rigorous bound on the truncation error."""
    normsq, dims = dominant_shifted_lattice(spec.rs, spec.cutoff)
    eps = float(spec.epsilon)
    power = 2 - 2 * spec.genus
    terms = dims ** power * np.exp(-eps * normsq / 2.0)
    s = math.fsum(terms.tolist())
    vol = spec.rs.vol_K() ** (2 * spec.genus)
    tail = vol * _migdal_tail(spec.rs, spec.genus, eps, spec.cutoff)
    return MigdalResult(value=vol * s, tail_bound=tail, terms_used=len(terms),
                        sum_part=s, vol_factor=vol)


def _zeta_upper(s: float) -> float:
    """Computable upper bound for zeta(s), s > 1."""
    n = 200
    partial = sum(k ** (-s) for k in range(1, n + 1))
    return partial + n ** (1 - s) / (s - 1)


def _witten_tail(rs: RootSystem, genus: int, m_max: int) -> float:
    """Bound for sum over dominant lattice points with a coefficient beyond m_max."""
    q = 2 * genus - 2
    if rs.kind == "A1":
        return m_max ** (1 - q) / (q - 1) if q > 1 else math.inf
    if rs.kind == "A2":
        # dim = m1 m2 (m1+m2)/2 >= m1 m2 max(m1,m2)/2
        z = _zeta_upper(q)
        tail_outer = m_max ** (1 - 2 * q) / (2 * q - 1)
        return 2.0 * (2.0 ** q) * z * tail_outer
    # G2: dim >= (9/140) (m1 m2)^3
    z = _zeta_upper(3 * q)
    tail_outer = m_max ** (1 - 3 * q) / (3 * q - 1)
    return 2.0 * ((140.0 / 9.0) ** q) * z * tail_outer


def witten_volume(rs: RootSystem, genus: int, cutoff: float,
                  literal_printed_constant: bool = False) -> MigdalResult:
    """#Z(K) Vol(K)^{2g} sum (dim V_nu)^{2-2g}, truncated with a tail bound.

    The prefactor is the small-coupling limit of the partition sum; the
    literal_printed_constant flag reports #Z(K) dim(K)^{2g} instead.
    """
    if genus < 2:
        raise ValueError("the flat-moduli volume sum needs genus >= 2")
    normsq, dims = dominant_shifted_lattice(rs, cutoff)
    power = 2 - 2 * genus
    s = math.fsum((dims ** power).tolist())
    lam = _min_eig_lower_bound(rs)
    m_max = max(1, int(math.floor(cutoff / math.sqrt(lam * rs.rank))))
    if literal_printed_constant:
        prefactor = rs.center_order() * float(rs.group_dim()) ** (2 * genus)
    else:
        prefactor = rs.center_order() * rs.vol_K() ** (2 * genus)
    tail = prefactor * _witten_tail(rs, genus, m_max)
    return MigdalResult(value=prefactor * s, tail_bound=tail, terms_used=len(dims),
                        sum_part=s, vol_factor=prefactor)


# -- genus-one SU(2) strata --------------------------------------------------


@dataclass(frozen=True)
class Su2Strata:
    strata: tuple[tuple[int, Measure], ...]
    one_point: Measure
    vol_T2: Fraction

    def total(self) -> Measure:
        out = self.one_point
        for _, m in self.strata:
            out = add(out, m)
        return out


def su2_genus1_strata(cutoff: int) -> Su2Strata:
    """Stratum measures for genus-one SU(2) in the rank-1 normalization.

    mu_xi = 1/2 Vol(T^2) (delta_xi star H_+ - delta_{-xi} star H_-) for
    xi = 1..cutoff; the reducible piece is the odd two-ray extension of
    the one-point function 1/4 Vol(T^2) (1 - 2 nu).
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    vol_t2 = Fraction(1)  # covolume of the coweight lattice, squared genus count
    half = Fraction(1, 2) * vol_t2
    quarter = Fraction(1, 4) * vol_t2
    strata = []
    for xi in range(1, cutoff + 1):
        m = add(make(half, (xi,), [(1,)]), make(-half, (-xi,), [(-1,)]))
        strata.append((xi, m))
    one_point = add(
        add(make(quarter, (0,), [(1,)]),
            make(-2 * quarter, (0,), [(1,), (1,)])),
        add(make(-quarter, (0,), [(-1,)]),
            make(2 * quarter, (0,), [(-1,), (-1,)])),
    )
    return Su2Strata(strata=tuple(strata), one_point=one_point, vol_T2=vol_t2)


@dataclass(frozen=True)
class SawtoothReport:
    lhs: float
    rhs: float
    gap: float
    lhs_raw: float
    pair_scale: float
    sigma: float


def sawtooth_identity(cutoff: int, epsilon) -> SawtoothReport:
    """Pair the truncated stratum sum with a Gaussian and compare to the
    partition sum per unit Vol(K)^{2g}.

    The strata live on the integer side of the rank-1 identification while
    the weight sum runs over half-integers n/2; Poisson summation matches
    frequency m to n when the test Gaussian has sigma^2 = eps/(16 pi^2),
    with the closed-form scale 2 sqrt(2 pi) sigma^3 on the paired value.
    """
    eps = float(epsilon)
    if cutoff < 20.0 / math.sqrt(eps):
        raise ValueError("cutoff too small for the requested tolerance (need >= 20/sqrt(eps))")
    rs = build_root_system("A1", "paper_su2")
    strata = su2_genus1_strata(cutoff)
    total = strata.total()
    sigma = math.sqrt(eps) / (4.0 * math.pi)
    h = GaussianSpec((0.0,), sigma)
    # K-invariant pairing: (base, Vol^K_T . h) with Vol^K_T(x) = 2x
    lhs_raw = pair_test(total, h, poly_weight=[Fraction(0), Fraction(2)]).value
    pair_scale = 2.0 * math.sqrt(2.0 * math.pi) * sigma ** 3
    lhs = lhs_raw / pair_scale
    spec = PartitionSpec(rs, genus=1, epsilon=Fraction(epsilon), cutoff=float(cutoff))
    mig = migdal_partition(spec)
    rhs = mig.sum_part
    return SawtoothReport(lhs=lhs, rhs=rhs, gap=lhs - rhs, lhs_raw=lhs_raw,
                          pair_scale=pair_scale, sigma=sigma)


# -- Harder-Narasimhan types --------------------------------------------------


@dataclass(frozen=True)
class HNType:
    blocks: tuple[tuple[int, int], ...]  # (rank r_j, degree d_j)

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(d, r) for r, d in self.blocks)

    def expanded_slopes(self) -> tuple[Fraction, ...]:
        out = []
        for r, d in self.blocks:
            out.extend([Fraction(d, r)] * r)
        return tuple(out)

    def __post_init__(self):
        sl = self.slopes
        if any(sl[i] <= sl[i + 1] for i in range(len(sl) - 1)):
            raise ValueError("block slopes must be strictly decreasing")
        if any(r < 1 for r, _ in self.blocks):
            raise ValueError("block ranks must be positive")


def hn_types(r: int, d: int, slope_bound) -> list[HNType]:
    """All Harder-Narasimhan types of rank r, degree d, with max |slope| bounded."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    bound = Fraction(slope_bound)
    out: list[HNType] = []

    def rec(rem_r: int, rem_d: int, prev_slope, acc: list[tuple[int, int]]):
        if rem_r == 0:
            if rem_d == 0:
                out.append(HNType(tuple(acc)))
            return
        for r1 in range(1, rem_r + 1):
            lo = -bound * r1
            hi = bound * r1 if prev_slope is None else min(bound * r1,
                                                           prev_slope * r1)
            d1 = math.ceil(lo) if lo.denominator > 1 else int(lo)
            while d1 <= hi:
                mu = Fraction(d1, r1)
                if (prev_slope is None or mu < prev_slope) and abs(mu) <= bound:
                    # remaining degrees must fit under slope mu with |.| <= bound
                    rem2 = rem_d - d1
                    min_possible = -bound * (rem_r - r1)
                    if rem_r - r1 == 0 or (min_possible <= rem2 and
                                           Fraction(rem2, rem_r - r1) < mu):
                        rec(rem_r - r1, rem2, mu, acc + [(r1, d1)])
                d1 += 1

    rec(r, d, None, [])
    uniq = sorted(set(out), key=lambda t: t.blocks)
    return uniq
