"""Closed algebra of signed delta-Heaviside convolution measures.

A Term is coeff * (delta_base star H_{v_1} star ... star H_{v_k}) where
H_v is the pushforward of Lebesgue measure on [0, inf) under t -> t v.
Terms are kept pointed (all rays in an open half-space) so convolution
stays well defined.  Densities are exact rationals computed by recursive
one-dimensional integration of the piecewise-polynomial slices; pairings
against Gaussians use closed-form error functions in rank one and seeded
Monte Carlo above that.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .rational import Mat, Vec, det, frac_str, solve, vec

__all__ = [
    "Term", "Measure", "SampleSpec", "GaussianSpec",
    "NonProperConvolution", "WallError", "SingularPartError", "DerivativeError",
    "make", "add", "scale", "convolve", "directional_derivative",
    "density_at", "pair_test", "equal", "antisymmetrize", "normal_form_1d",
    "lebesgue_line", "measure_to_json", "measure_from_json", "density_csv_rows",
]


class NonProperConvolution(ValueError):
    """Raised when a set of rays fails the open-half-space condition."""


class WallError(ValueError):
    """Raised when a density is requested on the wall arrangement."""


class SingularPartError(ValueError):
    """Raised when an operation needs an absolutely continuous measure."""


class DerivativeError(ValueError):
    """Raised when a term lacks the ray factor a derivative needs."""


# -- pointedness -------------------------------------------------------------


def _fm_feasible(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Find u with rows[i] . u >= rhs[i], by Fourier-Motzkin; None if infeasible."""
    nvar = len(rows[0]) if rows else 0
    if nvar == 0:
        return [] if all(c <= 0 for c in rhs) else None
    lower, upper, rest = [], [], []
    for row, c in zip(rows, rhs):
        a, b = row[:-1], row[-1]
        if b > 0:
            lower.append(([x / b for x in a], c / b))   # u_n >= c/b - a.u/b
        elif b < 0:
            upper.append(([x / b for x in a], c / b))   # u_n <= c/b - a.u/b
        else:
            rest.append((a, c))
    new_rows = [list(a) for a, _ in rest]
    new_rhs = [c for _, c in rest]
    for la, lc in lower:
        for ua, uc in upper:
            # lc - la.u <= uc - ua.u  ->  (la - ua).u >= lc - uc
            new_rows.append([x - y for x, y in zip(la, ua)])
            new_rhs.append(lc - uc)
    sub = _fm_feasible(new_rows, new_rhs) if new_rows else []
    if sub is None:
        return None
    lo = [lc - sum(x * u for x, u in zip(la, sub)) for la, lc in lower]
    hi = [uc - sum(x * u for x, u in zip(ua, sub)) for ua, uc in upper]
    lo_b = max(lo) if lo else None
    hi_b = min(hi) if hi else None
    if lo_b is not None and hi_b is not None and lo_b > hi_b:
        return None
    if lo_b is not None:
        val = lo_b if hi_b is None else (lo_b + hi_b) / 2
    elif hi_b is not None:
        val = hi_b
    else:
        val = Fraction(0)
    return sub + [val]


def pointedness_certificate(dirs: Sequence[Vec]) -> Vec | None:
    """A vector u with u . v >= 1 for every direction, or None."""
    if not dirs:
        return tuple()
    rows = [list(v) for v in dirs]
    rhs = [Fraction(1)] * len(dirs)
    sol = _fm_feasible(rows, rhs)
    return tuple(sol) if sol is not None else None


# -- terms and measures ------------------------------------------------------


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    base: Vec
    dirs: tuple[Vec, ...]  # sorted multiset

    @staticmethod
    def build(coeff, base, dirs) -> "Term":
        base = vec(base)
        dirs = tuple(sorted(vec(d) for d in dirs))
        if any(all(x == 0 for x in d) for d in dirs):
            raise NonProperConvolution("zero direction vector")
        if any(len(d) != len(base) for d in dirs):
            raise ValueError("dimension mismatch between base and dirs")
        if pointedness_certificate(dirs) is None:
            raise NonProperConvolution("non-proper convolution: rays not in an open half-space")
        return Term(Fraction(coeff), base, dirs)


@dataclass(frozen=True)
class Measure:
    rank: int
    terms: tuple[Term, ...]

    def is_zero(self) -> bool:
        return not self.terms

    def mass_dirs_max(self) -> int:
        return max((len(t.dirs) for t in self.terms), default=0)


def _normalize(rank: int, terms: Sequence[Term]) -> Measure:
    acc: dict[tuple[Vec, tuple[Vec, ...]], Fraction] = {}
    for t in terms:
        key = (t.base, t.dirs)
        acc[key] = acc.get(key, Fraction(0)) + t.coeff
    out = tuple(
        Term(c, b, d) for (b, d), c in sorted(acc.items()) if c != 0
    )
    return Measure(rank, out)


def make(coeff, base, dirs) -> Measure:
    base = vec(base)
    t = Term.build(coeff, base, dirs)
    return _normalize(len(base), [t])


def add(m1: Measure, m2: Measure) -> Measure:
    if m1.rank != m2.rank:
        raise ValueError("rank mismatch")
    return _normalize(m1.rank, list(m1.terms) + list(m2.terms))


def scale(c, m: Measure) -> Measure:
    c = Fraction(c)
    return _normalize(m.rank, [Term(c * t.coeff, t.base, t.dirs) for t in m.terms])


def convolve(m1: Measure, m2: Measure) -> Measure:
    if m1.rank != m2.rank:
        raise ValueError("rank mismatch")
    out = []
    for t1 in m1.terms:
        for t2 in m2.terms:
            out.append(Term.build(t1.coeff * t2.coeff,
                                  tuple(a + b for a, b in zip(t1.base, t2.base)),
                                  t1.dirs + t2.dirs))
    return _normalize(m1.rank, out)


def lebesgue_line(rank: int, v) -> Measure:
    """Lebesgue measure on the line R v, expanded as H_v + H_{-v}."""
    v = vec(v)
    zero = tuple(Fraction(0) for _ in range(rank))
    return add(make(1, zero, [v]), make(1, zero, [tuple(-x for x in v)]))


def directional_derivative(m: Measure, u) -> Measure:
    """Distributional derivative <d_u mu, h> = -<mu, D_u h>.

    Each term must carry a ray factor parallel to u; that factor is removed
    and the coefficient multiplied by 1/c where v = c u.
    """
    u = vec(u)
    if all(x == 0 for x in u):
        raise ValueError("zero derivative direction")
    out = []
    for t in m.terms:
        c = _parallel_factor(t.dirs, u)
        if c is None:
            raise DerivativeError(
                f"term with base {t.base} has no ray factor parallel to {u}")
        ratio, idx = c
        dirs = t.dirs[:idx] + t.dirs[idx + 1:]
        out.append(Term(t.coeff / ratio, t.base, dirs))
    return _normalize(m.rank, out)


def _parallel_factor(dirs: tuple[Vec, ...], u: Vec):
    piv = next(i for i, x in enumerate(u) if x != 0)
    for idx, v in enumerate(dirs):
        c = v[piv] / u[piv]
        if c != 0 and all(v[i] == c * u[i] for i in range(len(u))):
            return c, idx
    return None


def antisymmetrize(m: Measure, rs) -> Measure:
    """Signed Weyl average |W|^{-1} sum_w (-1)^{l(w)} w . mu (pushforward)."""
    if rs.rank != m.rank:
        raise ValueError("rank mismatch")
    terms = []
    n = len(rs.weyl_elements)
    for w in rs.weyl_elements:
        for t in m.terms:
            terms.append(Term(Fraction(w.sign, n) * t.coeff, w(t.base),
                              tuple(sorted(w(d) for d in t.dirs))))
    return _normalize(m.rank, terms)


# -- exact densities ---------------------------------------------------------


def _walls_of_term(t: Term, rank: int):
    """Affine hyperplanes base + span(S), |S| = rank-1, S subset of dirs."""
    if rank == 1:
        yield (t.base, None)
        return
    seen = set()
    for v in t.dirs:
        key = _primitive(v)
        if key not in seen:
            seen.add(key)
            yield (t.base, v)


def _primitive(v: Vec) -> Vec:
    num = [x.numerator for x in v]
    den = [x.denominator for x in v]
    l = math.lcm(*den) if den else 1
    ints = [n * (l // d) for n, d in zip(num, den)]
    g = math.gcd(*[abs(i) for i in ints])
    ints = [i // g for i in ints]
    lead = next(i for i in ints if i != 0)
    if lead < 0:
        ints = [-i for i in ints]
    return tuple(Fraction(i) for i in ints)


def _cross2(a: Vec, b: Vec) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _on_wall(x: Vec, m: Measure) -> bool:
    for t in m.terms:
        for base, v in _walls_of_term(t, m.rank):
            if m.rank == 1:
                if x[0] == base[0]:
                    return True
            else:
                if _cross2(tuple(a - b for a, b in zip(x, base)), v) == 0:
                    return True
    return False


def density_at(m: Measure, x) -> Fraction:
    """Exact density of the absolutely continuous measure at a wall-avoiding x."""
    x = vec(x)
    if len(x) != m.rank:
        raise ValueError("dimension mismatch")
    for t in m.terms:
        if len(t.dirs) < m.rank:
            raise SingularPartError("term with fewer rays than the rank; use pair_test")
        if _span_dim(t.dirs) < m.rank:
            raise SingularPartError("term rays do not span; singular part present")
    if _on_wall(x, m):
        raise WallError(f"density requested on the wall arrangement at {x}")
    total = Fraction(0)
    for t in m.terms:
        total += t.coeff * _term_density(t.base, t.dirs, x, m.rank)
    return total


def _span_dim(dirs: tuple[Vec, ...]) -> int:
    rows = [list(d) for d in dirs]
    r = 0
    cols = len(rows[0]) if rows else 0
    mat_ = [row[:] for row in rows]
    for c in range(cols):
        piv = next((i for i in range(r, len(mat_)) if mat_[i][c] != 0), None)
        if piv is None:
            continue
        mat_[r], mat_[piv] = mat_[piv], mat_[r]
        inv = 1 / mat_[r][c]
        mat_[r] = [v * inv for v in mat_[r]]
        for i in range(len(mat_)):
            if i != r and mat_[i][c]:
                f = mat_[i][c]
                mat_[i] = [v - f * w for v, w in zip(mat_[i], mat_[r])]
        r += 1
    return r


def _term_density(base: Vec, dirs: tuple[Vec, ...], x: Vec, rank: int) -> Fraction:
    k = len(dirs)
    y = tuple(a - b for a, b in zip(x, base))
    if k == rank:
        cols = tuple(zip(*dirs))
        d = det(tuple(tuple(r) for r in cols))
        if d == 0:
            raise SingularPartError("degenerate square direction system")
        t = solve(tuple(tuple(r) for r in cols), y)
        if any(ti == 0 for ti in t):
            raise WallError("slice hit a wall; perturb the sample point")
        return 1 / abs(d) if all(ti > 0 for ti in t) else Fraction(0)
    # recursive slice along the last direction
    v = dirs[-1]
    sub = dirs[:-1]
    u = pointedness_certificate(dirs)
    uv = sum(a * b for a, b in zip(u, v))
    uy = sum(a * b for a, b in zip(u, y))
    t_sup = uy / uv
    if t_sup <= 0:
        return Fraction(0)
    cuts = {Fraction(0), t_sup}
    subterm = Term(Fraction(1), base, sub)
    for wbase, wdir in _walls_of_term(subterm, rank):
        if rank == 1:
            denom = v[0]
            root = (x[0] - wbase[0]) / denom
        else:
            denom = _cross2(v, wdir)
            if denom == 0:
                continue
            root = _cross2(tuple(a - b for a, b in zip(x, wbase)), wdir) / denom
        if 0 < root < t_sup:
            cuts.add(root)
    pts = sorted(cuts)
    degree = max(len(sub) - rank, 0)
    total = Fraction(0)
    for a, b in zip(pts[:-1], pts[1:]):
        nodes = [a + (b - a) * Fraction(i + 1, degree + 2) for i in range(degree + 1)]
        vals = [_term_density(base, sub, tuple(xi - n * vi for xi, vi in zip(x, v)), rank)
                for n in nodes]
        poly = _interpolate(nodes, vals)
        total += _poly_defint(poly, a, b)
    return total


def _interpolate(nodes: list[Fraction], vals: list[Fraction]) -> tuple[Fraction, ...]:
    n = len(nodes)
    rows = tuple(tuple(x ** j for j in range(n)) for x in nodes)
    coeffs = solve(rows, tuple(vals))
    return coeffs


def _poly_defint(coeffs: Sequence[Fraction], a: Fraction, b: Fraction) -> Fraction:
    total = Fraction(0)
    for j, c in enumerate(coeffs):
        total += c * (b ** (j + 1) - a ** (j + 1)) / (j + 1)
    return total


# -- rank-1 normal form ------------------------------------------------------


@dataclass(frozen=True)
class NormalForm1D:
    atoms: tuple[tuple[Fraction, Fraction], ...]      # (position, mass)
    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, ...], ...]           # len = len(breakpoints) + 1


def normal_form_1d(m: Measure) -> NormalForm1D:
    if m.rank != 1:
        raise ValueError("normal_form_1d requires rank 1")
    atoms: dict[Fraction, Fraction] = {}
    contributions = []  # (breakpoint, side, poly in x)
    for t in m.terms:
        b = t.base[0]
        k = len(t.dirs)
        if k == 0:
            atoms[b] = atoms.get(b, Fraction(0)) + t.coeff
            continue
        signs = {1 if d[0] > 0 else -1 for d in t.dirs}
        s = signs.pop()
        assert not signs, "pointedness guarantees equal signs in rank 1"
        prod = Fraction(1)
        for d in t.dirs:
            prod *= abs(d[0])
        lead = t.coeff * Fraction(s ** (k - 1)) / (math.factorial(k - 1) * prod)
        poly = _poly_shift_power(lead, b, k - 1)
        contributions.append((b, s, poly))
    cand = sorted({b for b, _, _ in contributions} | set(atoms))
    pieces = []
    for i in range(len(cand) + 1):
        lo = cand[i - 1] if i > 0 else None
        hi = cand[i] if i < len(cand) else None
        mid = _interval_point(lo, hi)
        acc: list[Fraction] = []
        for b, s, poly in contributions:
            if (s > 0 and mid > b) or (s < 0 and mid < b):
                acc = _poly_add(acc, poly)
        pieces.append(tuple(acc))
    # drop breakpoints that separate identical pieces and carry no atom
    bks, out_pieces = [], [pieces[0]]
    for i, b in enumerate(cand):
        if pieces[i + 1] == out_pieces[-1] and b not in atoms:
            continue
        bks.append(b)
        out_pieces.append(pieces[i + 1])
    atoms_t = tuple(sorted((p, c) for p, c in atoms.items() if c != 0))
    return NormalForm1D(atoms_t, tuple(bks), tuple(out_pieces))


def _interval_point(lo, hi) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _poly_shift_power(lead: Fraction, b: Fraction, power: int) -> list[Fraction]:
    """Coefficients of lead * (x - b)^power."""
    coeffs = [Fraction(0)] * (power + 1)
    for j in range(power + 1):
        coeffs[j] = lead * math.comb(power, j) * ((-b) ** (power - j))
    return coeffs


def _poly_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# -- pairings ----------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSpec:
    """h(x) = amplitude * exp(-(x-c, x-c)_gram / (2 sigma^2))."""

    center: tuple[float, ...]
    sigma: float
    amplitude: float = 1.0
    gram: tuple[tuple[float, ...], ...] | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        d = np.asarray(x, dtype=float) - np.asarray(self.center, dtype=float)
        if self.gram is None:
            q = np.sum(d * d, axis=-1)
        else:
            g = np.asarray(self.gram, dtype=float)
            q = np.einsum("...i,ij,...j->...", d, g, d)
        return self.amplitude * np.exp(-q / (2.0 * self.sigma ** 2))


@dataclass(frozen=True)
class QuadSpec:
    samples: int = 200_000
    seed: int = 20240511
    workers: int = 1


@dataclass(frozen=True)
class PairResult:
    value: float
    std_error: float

    def __iter__(self):
        yield self.value
        yield self.std_error


def pair_test(m: Measure, h, quad: QuadSpec = QuadSpec(),
              poly_weight: Sequence | None = None) -> PairResult:
    """<mu, h> = sum over terms of coeff * int h(base + sum t_i v_i) dt.

    Rank-1 Gaussians (optionally times a polynomial weight) are evaluated in
    closed form via the error function; otherwise seeded Monte Carlo with a
    reported standard error.
    """
    if m.rank == 1 and isinstance(h, GaussianSpec):
        return PairResult(_pair_1d_gaussian(m, h, poly_weight), 0.0)
    if poly_weight is not None:
        raise ValueError("poly_weight is only supported on the rank-1 closed form")
    return _pair_mc(m, h, quad)


def _pair_1d_gaussian(m: Measure, h: GaussianSpec, poly_weight) -> float:
    g = 1.0 if h.gram is None else float(h.gram[0][0])
    s_eff = h.sigma / math.sqrt(g)
    nf = normal_form_1d(m)
    weight = [Fraction(w) for w in (poly_weight if poly_weight is not None else [1])]
    total = 0.0
    for pos, mass in nf.atoms:
        total += float(mass) * float(_poly_eval(weight, pos)) * \
            h.amplitude * math.exp(-(float(pos) - h.center[0]) ** 2 / (2 * s_eff ** 2))
    cuts = [None, *nf.breakpoints, None]
    for i, piece in enumerate(nf.pieces):
        if not piece:
            continue
        poly = _poly_mul(piece, weight)
        lo = None if i == 0 else float(nf.breakpoints[i - 1])
        hi = None if i == len(nf.pieces) - 1 else float(nf.breakpoints[i])
        total += h.amplitude * _poly_gauss_integral(
            [float(c) for c in poly], h.center[0], s_eff, lo, hi)
    return total


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_gauss_integral(coeffs: list[float], mu: float, sigma: float,
                         lo: float | None, hi: float | None) -> float:
    """int_lo^hi poly(x) exp(-(x-mu)^2/(2 sigma^2)) dx, exact in erf/exp."""
    r = sigma * math.sqrt(2.0)
    a = -math.inf if lo is None else (lo - mu) / r
    b = math.inf if hi is None else (hi - mu) / r
    deg = len(coeffs) - 1
    # expand poly(mu + r u) in u
    cu = [0.0] * (deg + 1)
    for n, c in enumerate(coeffs):
        for j in range(n + 1):
            cu[j] += c * math.comb(n, j) * (mu ** (n - j)) * (r ** j)
    moments = _gauss_moments(deg, a, b)
    return r * sum(cj * mj for cj, mj in zip(cu, moments))


def _gauss_moments(deg: int, a: float, b: float) -> list[float]:
    """M_k = int_a^b u^k e^{-u^2} du for k = 0..deg."""

    def e(x):
        return 0.0 if math.isinf(x) else math.exp(-x * x)

    def xe(x, k):
        return 0.0 if math.isinf(x) else x ** k * math.exp(-x * x)

    erf_term = math.sqrt(math.pi) / 2 * (math.erf(b) - math.erf(a))
    out = [erf_term]
    if deg >= 1:
        out.append((e(a) - e(b)) / 2.0)
    for k in range(2, deg + 1):
        out.append((xe(a, k - 1) - xe(b, k - 1)) / 2.0 + (k - 1) / 2.0 * out[k - 2])
    return out


def _pair_mc(m: Measure, h, quad: QuadSpec) -> float | PairResult:
    hf = h if callable(h) else GaussianSpec(tuple(h))
    per_worker = quad.samples // max(quad.workers, 1)
    values, variances = [], []
    for t in m.terms:
        k = len(t.dirs)
        base = np.array([float(x) for x in t.base])
        if k == 0:
            values.append(float(t.coeff) * float(hf(base[None, :])[0]))
            variances.append(0.0)
            continue
        dirmat = np.array([[float(x) for x in d] for d in t.dirs])  # k x rank
        sums = []
        for w in range(max(quad.workers, 1)):
            rng = np.random.default_rng((quad.seed, hash((t.base, t.dirs)) & 0xFFFF, w))
            ts = rng.exponential(scale=1.0, size=(per_worker, k))
            pts = base[None, :] + ts @ dirmat
            weights = np.exp(ts.sum(axis=1))
            sums.append(hf(pts) * weights)
        samp = np.concatenate(sums)
        values.append(float(t.coeff) * float(samp.mean()))
        variances.append(float(t.coeff) ** 2 * float(samp.var(ddof=1)) / samp.size)
    return PairResult(float(sum(values)), math.sqrt(sum(variances)))


# -- equality ----------------------------------------------------------------


@dataclass(frozen=True)
class SampleSpec:
    count: int = 9
    seed: int = 987654321
    window: tuple[tuple[Fraction, Fraction], ...] = ()
    max_draws: int = 40_000


def equal(m1: Measure, m2: Measure, spec: SampleSpec | None = None) -> bool:
    """Exact equality test for absolutely continuous measures.

    Rank 1 compares canonical normal forms (a complete decision procedure).
    Rank 2 is polynomial identity testing: exact densities are compared on
    wall-avoiding rational samples, at least (degree+1)^rank per discovered
    chamber of the joint wall arrangement.
    """
    if m1.rank != m2.rank:
        raise ValueError("rank mismatch")
    diff = add(m1, scale(-1, m2))
    for t in diff.terms:
        if len(t.dirs) < diff.rank or _span_dim(t.dirs) < diff.rank:
            raise SingularPartError("equal() requires absolutely continuous measures")
    if diff.is_zero():
        return True
    if diff.rank == 1:
        nf = normal_form_1d(diff)
        return not nf.atoms and all(not p for p in nf.pieces)
    return _equal_by_sampling(diff, spec)


def _equal_by_sampling(diff: Measure, spec: SampleSpec | None) -> bool:
    rank = diff.rank
    degree = max(len(t.dirs) - rank for t in diff.terms)
    need = (degree + 1) ** rank
    if spec is None:
        spec = SampleSpec()
    need = max(need, 1)
    window = spec.window or _default_window(diff)
    walls = set()
    for t in diff.terms:
        for base, v in _walls_of_term(t, rank):
            n = _primitive((v[1], -v[0]))
            c = n[0] * base[0] + n[1] * base[1]
            walls.add((n, c))
    walls = sorted(walls)
    rng = np.random.default_rng(spec.seed)
    denom = 257
    chambers: dict[tuple, int] = {}
    checked = 0
    for _ in range(spec.max_draws):
        pt = tuple(lo + (hi - lo) * Fraction(int(rng.integers(1, denom)), denom)
                   for lo, hi in window)
        sig = tuple(1 if (n[0] * pt[0] + n[1] * pt[1]) > c else -1 if
                    (n[0] * pt[0] + n[1] * pt[1]) < c else 0 for n, c in walls)
        if 0 in sig:
            continue
        if chambers.get(sig, 0) >= spec.count and checked >= need:
            continue
        if density_at(diff, pt) != 0:
            return False
        chambers[sig] = chambers.get(sig, 0) + 1
        checked += 1
        if checked >= spec.max_draws:
            break
        if all(v >= spec.count for v in chambers.values()) and checked >= need \
                and checked >= 8 * len(chambers):
            break
    return True


def _default_window(m: Measure) -> tuple[tuple[Fraction, Fraction], ...]:
    rank = m.rank
    lo = [Fraction(0)] * rank
    hi = [Fraction(0)] * rank
    for t in m.terms:
        reach = sum((abs(x) for d in t.dirs for x in d), Fraction(0)) + 1
        for i in range(rank):
            lo[i] = min(lo[i], t.base[i] - reach)
            hi[i] = max(hi[i], t.base[i] + reach)
    return tuple((l - 1, h + 1) for l, h in zip(lo, hi))


# -- serialization -----------------------------------------------------------


def measure_to_json(m: Measure) -> str:
    payload = {
        "rank": m.rank,
        "terms": [
            {
                "coeff": frac_str(t.coeff),
                "base": [frac_str(x) for x in t.base],
                "dirs": [[frac_str(x) for x in d] for d in t.dirs],
            }
            for t in m.terms
        ],
    }
    return json.dumps(payload, sort_keys=True)


def measure_from_json(s: str) -> Measure:
    payload = json.loads(s)
    terms = [
        Term.build(Fraction(t["coeff"]), [Fraction(x) for x in t["base"]],
                   [[Fraction(x) for x in d] for d in t["dirs"]])
        for t in payload["terms"]
    ]
    return _normalize(payload["rank"], terms)


def density_csv_rows(m: Measure, points: Sequence[Vec]) -> list[list[str]]:
    header = [f"x_{i+1}" for i in range(m.rank)] + ["density", "density_exact"]
    rows = [header]
    for p in points:
        p = vec(p)
        d = density_at(m, p)
        rows.append([f"{float(x):.12g}" for x in p] + [f"{float(d):.12g}", frac_str(d)])
    return rows
