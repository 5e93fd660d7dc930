"""Root systems, Weyl groups, and coadjoint orbit volumes for A1, A2, G2.

All data is exact: vectors are Fraction tuples in a fixed coordinate
system and the invariant form is a rational Gram matrix.  A2 and G2 are
realized in the coordinates of the A2 fundamental-weight basis, which is
the identification the worked fixtures use.  Powers of 2*pi are carried
symbolically by TwoPiPow and never collapsed to floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .rational import (
    Mat,
    Vec,
    det,
    dot,
    frac_str,
    identity,
    inverse,
    mat,
    matmul,
    matvec,
    parse_frac,
    vec,
    vscale,
    vsub,
)

SUPPORTED_KINDS = ("A1", "A2", "G2")


@dataclass(frozen=True)
class TwoPiPow:
    """Exact rational times an integer power of 2*pi."""

    mantissa: Fraction
    two_pi_exp: int

    def __mul__(self, other: "TwoPiPow") -> "TwoPiPow":
        return TwoPiPow(self.mantissa * other.mantissa, self.two_pi_exp + other.two_pi_exp)

    def __truediv__(self, other: "TwoPiPow") -> "TwoPiPow":
        return TwoPiPow(self.mantissa / other.mantissa, self.two_pi_exp - other.two_pi_exp)

    def scaled(self, c) -> "TwoPiPow":
        return TwoPiPow(self.mantissa * Fraction(c), self.two_pi_exp)

    def __float__(self) -> float:
        return float(self.mantissa) * (2.0 * math.pi) ** self.two_pi_exp


@dataclass(frozen=True)
class WeylElement:
    matrix: Mat
    sign: int  # (-1)^{l(w)} = det(w)

    def __call__(self, x: Vec) -> Vec:
        return matvec(self.matrix, x)


class RootSystem:
    """Immutable root-system data with an explicit rational Gram matrix."""

    def __init__(self, kind: str, normalization: str, simple_roots: Mat, gram: Mat,
                 coweight_basis: Mat):
        self.kind = kind
        self.normalization = normalization
        self.rank = len(simple_roots)
        self.simple_roots = simple_roots
        self.gram = gram
        self.coweight_basis = coweight_basis
        self.positive_roots = self._close_positive_roots()
        self.weyl_elements = self._generate_weyl()
        self.rho = vscale(Fraction(1, 2), reduce(lambda a, b: tuple(x + y for x, y in zip(a, b)),
                                                 self.positive_roots))
        self.fundamental_weights = self._fundamental_weights()
        self._check_invariants()

    # -- construction ------------------------------------------------------

    def ip(self, a: Vec, b: Vec) -> Fraction:
        return dot(a, matvec(self.gram, b))

    def coroot(self, alpha: Vec) -> Vec:
        return vscale(Fraction(2) / self.ip(alpha, alpha), alpha)

    def reflection(self, alpha: Vec) -> Mat:
        """Matrix of s_alpha(x) = x - (x, alpha^vee) alpha in coordinates."""
        av = self.coroot(alpha)
        ga = matvec(self.gram, av)
        n = self.rank
        return tuple(
            tuple((Fraction(1 if i == j else 0)) - alpha[i] * ga[j] for j in range(n))
            for i in range(n)
        )

    def _close_positive_roots(self) -> tuple[Vec, ...]:
        roots = set(self.simple_roots)
        refls = [self.reflection(a) for a in self.simple_roots]
        frontier = set(roots)
        while frontier:
            new = set()
            for r in frontier:
                for m in refls:
                    img = matvec(m, r)
                    if img not in roots and tuple(-x for x in img) not in roots:
                        new.add(img)
            # keep the half positive on the simple-coroot cone
            roots |= new
            frontier = new
        allroots = set(roots) | {tuple(-x for x in r) for r in roots}
        positives = [r for r in allroots if self._is_positive_combination(r)]
        positives.sort()
        return tuple(positives)

    def _is_positive_combination(self, r: Vec) -> bool:
        smat = tuple(zip(*self.simple_roots))  # columns are simple roots
        coeffs = _solve_cols(smat, r)
        return coeffs is not None and all(c >= 0 for c in coeffs)

    def _generate_weyl(self) -> tuple[WeylElement, ...]:
        gens = [self.reflection(a) for a in self.simple_roots]
        seen = {identity(self.rank)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    prod = matmul(g, m)
                    if prod not in seen:
                        seen.add(prod)
                        nxt.append(prod)
            frontier = nxt
        elems = [WeylElement(m, 1 if det(m) > 0 else -1) for m in sorted(seen)]
        return tuple(elems)

    def _fundamental_weights(self) -> tuple[Vec, ...]:
        # rows of the inverse of the matrix whose rows are G * coroot_i
        rows = mat([matvec(self.gram, self.coroot(a)) for a in self.simple_roots])
        return tuple(tuple(col) for col in zip(*inverse(rows)))

    def _check_invariants(self) -> None:
        for w in self.weyl_elements:
            gw = matmul(matmul(_transpose(w.matrix), self.gram), w.matrix)
            if gw != self.gram:
                raise AssertionError("Weyl element does not preserve the form")
        for i, fw in enumerate(self.fundamental_weights):
            for j, a in enumerate(self.simple_roots):
                expect = Fraction(1 if i == j else 0)
                if self.ip(fw, self.coroot(a)) != expect:
                    raise AssertionError("fundamental weight pairing failed")

    # -- queries -----------------------------------------------------------

    def is_dominant(self, lam: Vec) -> bool:
        return all(self.ip(lam, self.coroot(a)) >= 0 for a in self.simple_roots)

    def is_regular(self, lam: Vec) -> bool:
        return all(self.ip(a, lam) != 0 for a in self.positive_roots)

    def in_weight_lattice(self, lam: Vec) -> bool:
        cols = tuple(zip(*self.fundamental_weights))
        coeffs = _solve_cols(cols, lam)
        return coeffs is not None and all(c.denominator == 1 for c in coeffs)

    def weight_coords(self, lam: Vec) -> Vec:
        """Coordinates of lam in the fundamental-weight basis."""
        cols = tuple(zip(*self.fundamental_weights))
        coeffs = _solve_cols(cols, lam)
        if coeffs is None:
            raise ValueError("fundamental weights do not span")
        return coeffs

    def weyl_orbit(self, lam: Vec) -> list[tuple[WeylElement, Vec]]:
        """One (w, w lam) pair per distinct orbit point (W/W_lam cosets)."""
        seen: dict[Vec, WeylElement] = {}
        for w in self.weyl_elements:
            img = w(lam)
            if img not in seen:
                seen[img] = w
        return [(w, img) for img, w in seen.items()]

    def norm_sq(self, x: Vec) -> Fraction:
        return self.ip(x, x)

    def coweight_covolume_sq(self) -> Fraction:
        b = tuple(zip(*self.coweight_basis))  # columns
        bm = mat(b)
        g = matmul(matmul(self.coweight_basis, self.gram), _transpose(self.coweight_basis))
        del bm
        return det(g)

    def vol_T(self) -> float:
        return math.sqrt(float(self.coweight_covolume_sq()))

    def vol_K_mod_T(self) -> TwoPiPow:
        """Vol(K/T) from the volume relation at a regular point."""
        n = len(self.positive_roots)
        prod = reduce(lambda a, b: a * b, (self.ip(a, self.rho) for a in self.positive_roots),
                      Fraction(1))
        return TwoPiPow(1 / prod, -n)

    def vol_K(self) -> float:
        return self.vol_T() * float(self.vol_K_mod_T())

    def center_order(self) -> int:
        return {"A1": 2, "A2": 3, "G2": 1}[self.kind]

    def group_dim(self) -> int:
        return self.rank + 2 * len(self.positive_roots)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "normalization": self.normalization,
            "simple_roots": [[frac_str(x) for x in r] for r in self.simple_roots],
            "inner_product": [[frac_str(x) for x in row] for row in self.gram],
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "RootSystem":
        payload = json.loads(s)
        return build_root_system(payload["kind"], payload["normalization"])

    def __repr__(self) -> str:
        return f"RootSystem({self.kind}, {self.normalization})"


def _transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def _solve_cols(cols, rhs: Vec) -> Vec | None:
    from .rational import solve

    m = tuple(tuple(Fraction(x) for x in row) for row in cols)
    return solve(m, rhs)


def build_root_system(kind: str, normalization: str = "basic") -> RootSystem:
    """Construct A1, A2, or G2 with the requested inner-product normalization.

    "basic" gives long roots squared length 2.  "paper_su2" is the rank-1
    identification with the real line: standard inner product, fundamental
    weight 1/2, coweight lattice with basis (1).
    """
    if kind not in SUPPORTED_KINDS:
        raise ValueError(f"unsupported kind {kind!r}")
    if normalization not in ("basic", "paper_su2"):
        raise ValueError(f"unsupported normalization {normalization!r}")
    if normalization == "paper_su2" and kind != "A1":
        raise ValueError("paper_su2 normalization is defined for A1 only")

    if kind == "A1":
        if normalization == "paper_su2":
            gram = mat([[1]])
            simple = mat([[1]])
            cow = mat([[1]])
        else:
            gram = mat([[2]])
            simple = mat([[1]])
            cow = mat([[1]])  # coroot = alpha for squared length 2
        return RootSystem(kind, normalization, simple, gram, cow)

    if kind == "A2":
        # coordinates: fundamental-weight basis; Gram = inverse Cartan matrix
        gram = mat([[Fraction(2, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(2, 3)]])
        simple = mat([[2, -1], [-1, 2]])
        cow = simple  # coroots = roots (simply laced, length^2 = 2)
        return RootSystem(kind, normalization, simple, gram, cow)

    # G2, realized in the same plane: short simple (-1,2), long simple (3,-3),
    # Gram scaled so the long roots have squared length 2.
    gram = mat([[Fraction(2, 9), Fraction(1, 9)], [Fraction(1, 9), Fraction(2, 9)]])
    simple = mat([[-1, 2], [3, -3]])
    cow = mat([[-3, 6], [3, -3]])  # coroots: 3*short, long
    return RootSystem(kind, normalization, simple, gram, cow)


# -- representation-theoretic and volume operations -------------------------


def dim_irrep(rs: RootSystem, lam: Vec):
    """Weyl dimension formula; exact int for lattice weights, Fraction otherwise."""
    lam = vec(lam)
    if not rs.is_dominant(lam):
        raise ValueError("dim_irrep requires a dominant weight")
    shifted = tuple(x + r for x, r in zip(lam, rs.rho))
    val = Fraction(1)
    for a in rs.positive_roots:
        val *= rs.ip(a, shifted) / rs.ip(a, rs.rho)
    if rs.in_weight_lattice(lam):
        assert val.denominator == 1
        return int(val)
    return val


@dataclass(frozen=True)
class OrbitVolumes:
    symplectic: Fraction
    riemannian: TwoPiPow
    vol_K_mod_stab: TwoPiPow


def orbit_volumes(rs: RootSystem, lam: Vec) -> OrbitVolumes:
    """Symplectic and Riemannian volumes of the orbit through lam.

    Products run over positive roots not vanishing at lam; the symplectic
    volume is the absolute value of the localization product, and the
    (2*pi)-powers of the Riemannian quantities stay symbolic.
    """
    lam = vec(lam)
    active = [a for a in rs.positive_roots if rs.ip(a, lam) != 0]
    n = len(active)
    prod_lam = reduce(lambda x, y: x * y, (rs.ip(a, lam) for a in active), Fraction(1))
    prod_rho = reduce(lambda x, y: x * y, (rs.ip(a, rs.rho) for a in active), Fraction(1))
    symplectic = abs(prod_lam / prod_rho)
    vol_k_mod_stab = TwoPiPow(1 / prod_rho, -n)
    riemannian = TwoPiPow(abs(prod_lam) ** 2, 2 * n).scaled(1) * vol_k_mod_stab
    return OrbitVolumes(symplectic=symplectic, riemannian=riemannian,
                        vol_K_mod_stab=vol_k_mod_stab)


class VolPoly:
    """The Weyl-anti-invariant volume polynomial prod (alpha, x)/(alpha, rho)."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.degree = len(rs.positive_roots)

    def __call__(self, x: Vec) -> Fraction:
        x = vec(x)
        val = Fraction(1)
        for a in self.rs.positive_roots:
            val *= self.rs.ip(a, x) / self.rs.ip(a, self.rs.rho)
        return val


def vol_poly(rs: RootSystem) -> VolPoly:
    return VolPoly(rs)
