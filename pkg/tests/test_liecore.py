from fractions import Fraction as F

import numpy as np
import pytest

from momentloc.liecore import (
    RootSystem,
    build_root_system,
    dim_irrep,
    orbit_volumes,
    vol_poly,
)
from momentloc.rational import vec

from oracles import freudenthal_dim, weyl_closure_count


def test_counts(a1, a2, g2):
    assert len(a1.positive_roots) == 1 and len(a1.weyl_elements) == 2
    assert len(a2.positive_roots) == 3 and len(a2.weyl_elements) == 6
    assert len(g2.positive_roots) == 6 and len(g2.weyl_elements) == 12


def test_weyl_closure_oracle(a2, g2):
    # closure over all root reflections must reproduce the group order
    assert weyl_closure_count(a2) == 6
    assert weyl_closure_count(g2) == 12


def test_positive_roots_are_positive_combinations(a2, g2):
    for rs in (a2, g2):
        cols = tuple(zip(*rs.simple_roots))
        from momentloc.rational import solve

        for r in rs.positive_roots:
            coeffs = solve(tuple(tuple(x) for x in cols), r)
            assert all(c >= 0 and c.denominator == 1 for c in coeffs)


def test_weyl_preserves_form_and_permutes_roots(a2, g2):
    for rs in (a2, g2):
        roots = set(rs.positive_roots) | {tuple(-x for x in r) for r in rs.positive_roots}
        for w in rs.weyl_elements:
            assert {w(r) for r in roots} == roots


def test_sign_is_determinant_parity(a2):
    from momentloc.rational import det

    for w in a2.weyl_elements:
        assert w.sign == (1 if det(w.matrix) == 1 else -1)


def test_paper_su2_normalization(a1_su2):
    assert a1_su2.fundamental_weights == ((F(1, 2),),)
    assert a1_su2.rho == (F(1, 2),)
    assert a1_su2.coweight_covolume_sq() == 1
    assert a1_su2.ip((1,), (1,)) == 1


def test_fundamental_weight_coroot_pairing(a1, a2, g2):
    for rs in (a1, a2, g2):
        for i, fw in enumerate(rs.fundamental_weights):
            for j, a in enumerate(rs.simple_roots):
                assert rs.ip(fw, rs.coroot(a)) == (1 if i == j else 0)


def test_unsupported_kind_and_normalization():
    with pytest.raises(ValueError):
        build_root_system("B2")
    with pytest.raises(ValueError):
        build_root_system("A2", "paper_su2")


def test_dim_irrep_small(a1, a2, g2):
    assert dim_irrep(a1, a1.fundamental_weights[0]) == 2
    assert dim_irrep(a2, (1, 1)) == 8
    assert dim_irrep(g2, (3, 0)) == 14  # adjoint at the highest root
    assert dim_irrep(g2, (1, 1)) == 7


def test_dim_irrep_matches_freudenthal(a1, a2):
    for rs, bound in ((a1, 8), (a2, 3)):
        fws = rs.fundamental_weights
        coeff_ranges = range(bound + 1)
        for c1 in coeff_ranges:
            if rs.rank == 1:
                lam = vec([c1 * fws[0][0]])
                if rs.norm_sq(lam) > 16:
                    continue
                assert dim_irrep(rs, lam) == freudenthal_dim(rs, lam)
            else:
                for c2 in coeff_ranges:
                    lam = vec([c1 * fws[0][i] + c2 * fws[1][i] for i in range(2)])
                    if rs.norm_sq(lam) > 16:
                        continue
                    assert dim_irrep(rs, lam) == freudenthal_dim(rs, lam)


def test_dim_irrep_g2_freudenthal(g2):
    assert dim_irrep(g2, (1, 1)) == freudenthal_dim(g2, (1, 1))
    assert dim_irrep(g2, (3, 0)) == freudenthal_dim(g2, (3, 0))


def test_dim_irrep_rejects_nondominant(a2):
    with pytest.raises(ValueError):
        dim_irrep(a2, (-1, 0))


def test_dim_irrep_rational_extension(a1_su2):
    val = dim_irrep(a1_su2, (F(1, 3),))
    assert val == F(5, 3)


def test_orbit_volume_point():
    rs = build_root_system("A1", "paper_su2")
    ov = orbit_volumes(rs, (0,))
    assert ov.symplectic == 1


def test_orbit_volume_ratio_identity(a1, a2, g2):
    rng = np.random.default_rng(5)
    for rs in (a1, a2, g2):
        for _ in range(20):
            coeffs = [F(int(rng.integers(0, 9)), int(rng.integers(1, 5)))
                      for _ in range(rs.rank)]
            lam = vec([sum(c * w[i] for c, w in zip(coeffs, rs.fundamental_weights))
                       for i in range(rs.rank)])
            ov = orbit_volumes(rs, lam)
            active = [a for a in rs.positive_roots if rs.ip(a, lam) != 0]
            prod = F(1)
            for al in active:
                prod *= abs(rs.ip(al, lam))
            ratio = ov.riemannian.scaled(1 / ov.symplectic)
            assert ratio.two_pi_exp == len(active)
            assert ratio.mantissa == prod


def test_orbit_volume_vs_volgt(a2):
    # Vol = (2 pi)^{n} prod (alpha,lam) Vol(K/K_lam) with both sides symbolic
    lam = vec((1, 1))
    ov = orbit_volumes(a2, lam)
    active = [a for a in a2.positive_roots]
    prod = F(1)
    for al in active:
        prod *= a2.ip(al, lam)
    lhs = ov.vol_K_mod_stab.scaled(prod)
    assert lhs.two_pi_exp == -3
    assert F(ov.symplectic) == lhs.mantissa * 1  # (2 pi)^{3} * lhs has exp 0
    assert ov.symplectic == prod * ov.vol_K_mod_stab.mantissa


def test_vol_poly(a1_su2, a2):
    vp = vol_poly(a1_su2)
    assert vp((1,)) == 2 and vp((F(1, 2),)) == 1
    assert vol_poly(a2)(a2.rho) == 1
    # anti-invariance under each Weyl element
    vp2 = vol_poly(a2)
    lam = vec((F(2, 3), F(5, 7)))
    for w in a2.weyl_elements:
        assert vp2(w(lam)) == w.sign * vp2(lam)


def test_root_system_json_roundtrip(a2, g2):
    for rs in (a2, g2):
        back = RootSystem.from_json(rs.to_json())
        assert back.simple_roots == rs.simple_roots
        assert back.gram == rs.gram
        assert len(back.weyl_elements) == len(rs.weyl_elements)


def test_weight_lattice_membership(a2, g2):
    assert a2.in_weight_lattice((1, 1))
    assert not a2.in_weight_lattice((F(1, 2), 0))
    assert g2.in_weight_lattice((3, 0)) and g2.in_weight_lattice((1, 1))
    assert not g2.in_weight_lattice((1, 0))  # not in Z w1 + Z w2


def test_vol_K_paper_su2(a1_su2):
    import math

    assert a1_su2.vol_T() == 1.0
    assert abs(a1_su2.vol_K() - 1.0 / math.pi) < 1e-15
