import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from diskir.errors import ZernikeIndexError
from diskir.zernike import (
    DiskPoint,
    ZernikeIndex,
    angular_part,
    build_basis,
    norm_constant,
    radial_poly,
    radial_poly_jacobi,
    zernike_eval,
)


def all_indices(max_m):
    return [(m, l) for m in range(max_m + 1) for l in range(-m, m + 1, 2)]


def disk_product_rule(nr, nt):
    """Gauss-Legendre in r on [0, 1] times trapezoid in theta; weight r dr dtheta."""
    t, w = np.polynomial.legendre.leggauss(nr)
    r = (t + 1) / 2
    wr = w / 2 * r
    theta = 2 * np.pi * np.arange(nt) / nt
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    ww = np.outer(wr, np.full(nt, 2 * np.pi / nt))
    return rr.ravel(), tt.ravel(), ww.ravel()


@pytest.mark.parametrize("m,l", [(1, 0), (2, 1), (3, 5), (-1, 1), (4, -6)])
def test_invalid_index(m, l):
    with pytest.raises(ZernikeIndexError):
        ZernikeIndex(m, l)
    with pytest.raises(ZernikeIndexError):
        radial_poly((m, l), 0.5)
    with pytest.raises(ZernikeIndexError):
        radial_poly_jacobi((m, l), 0.5)


def test_radial_constant():
    assert radial_poly((0, 0), 0.37) == 1.0


@pytest.mark.parametrize("r,expected", [(0.0, -1.0), (0.5, -0.5), (1.0, 1.0)])
def test_radial_m2(r, expected):
    # R_2^0 = 2 r^2 - 1, evaluated in exact rationals
    exact = 2 * Fraction(r) ** 2 - 1
    assert float(exact) == expected
    assert radial_poly((2, 0), r) == expected
    assert radial_poly_jacobi((2, 0), r) == pytest.approx(expected, abs=1e-15)


def test_radial_6_2_against_jacobi():
    # hand expansion: R_6^2 = 15 r^6 - 20 r^4 + 6 r^2
    r = Fraction(8, 10)
    frozen = float(15 * r**6 - 20 * r**4 + 6 * r**2)
    assert frozen == pytest.approx(-0.41984, abs=1e-15)
    via_scipy = 0.8**2 * scipy.special.eval_jacobi(2, 2, 0, 1 - 2 * 0.64)
    assert radial_poly((6, 2), 0.8) == pytest.approx(frozen, abs=1e-15)
    assert radial_poly_jacobi((6, 2), 0.8) == pytest.approx(via_scipy, abs=1e-14)
    assert radial_poly_jacobi((6, 2), 0.8) == pytest.approx(frozen, abs=1e-14)


def test_jacobi_form_examples():
    assert radial_poly_jacobi((1, 1), 0.6) == pytest.approx(0.6, abs=1e-16)
    assert radial_poly_jacobi((4, 0), 1.0) == pytest.approx(1.0, abs=1e-14)
    assert radial_poly((4, 0), 1.0) == 1.0
    assert abs(radial_poly_jacobi((3, 1), 0.25) - radial_poly((3, 1), 0.25)) <= 1e-13


def test_explicit_sum_matches_recurrence_up_to_20():
    rng = np.random.default_rng(0)
    r = rng.uniform(0, 1, 200)
    for m, l in all_indices(20):
        a = radial_poly((m, l), r)
        b = radial_poly_jacobi((m, l), r)
        assert np.all(np.abs(a - b) <= 1e-11 * np.maximum(1, np.abs(a))), (m, l)


def test_explicit_sum_large_order_is_finite():
    v = radial_poly((120, 0), 0.9)
    assert math.isfinite(v) and abs(v) <= 1.0


def test_value_at_unit_radius():
    for m, l in all_indices(20):
        assert abs(radial_poly_jacobi((m, l), 1.0) - 1.0) <= 1e-12
        assert radial_poly((m, l), 1.0) == 1.0


@pytest.mark.parametrize("l,theta,expected", [
    (0, 1.234, 1.0),
    (-2, math.pi / 4, 1.0),
    (3, math.pi, -1.0),
])
def test_angular_part(l, theta, expected):
    assert angular_part(l, theta) == pytest.approx(expected, abs=1e-15)


def test_piston_is_constant():
    g = norm_constant((0, 0))
    for p in (DiskPoint.from_polar(0.0, 0.0), DiskPoint.from_polar(0.7, 2.0)):
        assert zernike_eval((0, 0), p) == pytest.approx(g, rel=1e-15)
    assert g == pytest.approx(1 / math.sqrt(math.pi))


def test_norm_constants():
    assert norm_constant((3, 1)) == pytest.approx(math.sqrt(8 / math.pi))
    assert norm_constant((4, 0)) == pytest.approx(math.sqrt(5 / math.pi))
    with pytest.raises(ValueError):
        zernike_eval((1, 1), DiskPoint.from_polar(0.5, 0.1), gamma=0.0)


def _inner(i1, i2, rule):
    r, t, w = rule
    z1 = norm_constant(i1) * radial_poly_jacobi(i1, r) * angular_part(i1[1], t)
    z2 = norm_constant(i2) * radial_poly_jacobi(i2, r) * angular_part(i2[1], t)
    return float(np.sum(w * z1 * z2))


def test_orthonormal_pairs():
    rule = disk_product_rule(21, 41)  # exact through degree 40
    assert _inner((2, 0), (2, 0), rule) == pytest.approx(1.0, abs=1e-10)
    assert abs(_inner((3, 1), (3, -1), rule)) <= 1e-12


def test_gram_first_21_is_identity():
    r, t, w = disk_product_rule(31, 61)  # degree 60
    U = build_basis(5).evaluate_polar(r, t)
    G = U.T @ (w[:, None] * U)
    assert np.max(np.abs(G - np.eye(21))) <= 1e-9


def test_build_basis_sizes():
    assert build_basis(0).entries == (ZernikeIndex(0, 0),)
    assert len(build_basis(5)) == 21
    assert len(build_basis(10)) == 66


def test_build_basis_graded_prefixes():
    basis = build_basis(10)
    for m in range(11):
        M = (m + 1) * (m + 2) // 2
        prefix = basis.entries[:M]
        assert all(idx.m <= m for idx in prefix)
        assert sorted((i.m, i.l) for i in prefix) == sorted(all_indices(m))
    # within one order l ascends in steps of 2
    assert [i.l for i in basis.entries if i.m == 4] == [-4, -2, 0, 2, 4]
    for j, idx in enumerate(basis.entries):
        assert basis.position(idx.m, idx.l) == j


@settings(max_examples=50, deadline=None)
@given(
    r=st.floats(0, 1),
    theta=st.floats(0, 2 * math.pi, exclude_max=True),
)
def test_bulk_evaluation_matches_pointwise(r, theta):
    basis = build_basis(8)
    row = basis.evaluate_polar([r], [theta])[0]
    p = DiskPoint.from_polar(r, theta)
    expected = [zernike_eval(idx, p) for idx in basis]
    np.testing.assert_allclose(row, expected, rtol=1e-12, atol=1e-12)


def test_cartesian_and_polar_evaluation_agree():
    rng = np.random.default_rng(3)
    r = np.sqrt(rng.uniform(0, 1, 50))
    t = rng.uniform(0, 2 * np.pi, 50)
    basis = build_basis(12)
    np.testing.assert_allclose(
        basis.evaluate(r * np.cos(t), r * np.sin(t)), basis.evaluate_polar(r, t), atol=1e-12
    )


def test_disk_point_invariants():
    p = DiskPoint.from_polar(0.3, 7.0)
    assert 0 <= p.theta < 2 * math.pi
    assert abs(p.x - p.r * math.cos(p.theta)) <= 1e-14
    assert abs(p.y - p.r * math.sin(p.theta)) <= 1e-14
    q = DiskPoint.from_cartesian(-0.2, -0.1)
    assert q.x ** 2 + q.y ** 2 <= 1 + 1e-12
    assert abs(q.x - q.r * math.cos(q.theta)) <= 1e-14
