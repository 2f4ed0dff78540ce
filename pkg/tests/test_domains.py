import math
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from anisolattice.domains import (Box, Ellipsoid, ball, bounding_box, contains, domain_from_json,
                                  domain_to_json, slice_volume, slice_volume_box,
                                  slice_volume_ellipsoid, slice_volume_mc, superellipsoid,
                                  unit_ball_volume)
from anisolattice.exact import QuadScalar, parse_scalar
from anisolattice.lattice import build_subspace

X_AXIS = build_subspace([[1, 0]], 2)
Z_AXIS = build_subspace([[0, 0, 1]], 3)
DISK = ball([0, 0], 1)


def test_contains_examples():
    assert contains(DISK, [0, 0])
    assert not contains(DISK, [1, 0])
    assert contains(DISK, [Fr(1, 2), QuadScalar(0, Fr(1, 2), 2)])
    # exactly on the boundary in Q(sqrt 2): (1/sqrt2, 1/sqrt2)
    h = QuadScalar(0, Fr(1, 2), 2)
    assert not contains(DISK, [h, h])


def test_box_is_open():
    B = Box((Fr(-1), Fr(0)), (Fr(1), Fr(2)))
    assert contains(B, [0, 1])
    assert not contains(B, [1, 1])
    assert not contains(B, [0, 0])
    assert B.volume == 4


def test_bounding_boxes():
    b = bounding_box(DISK)
    assert (b.lower, b.upper) == ((-1, -1), (1, 1))
    E = Ellipsoid((0, 0), ((1, 0), (0, 4)))
    b = bounding_box(E)
    assert (b.lower, b.upper) == ((-1, Fr(-1, 2)), (1, Fr(1, 2)))
    B = Box((Fr(0), Fr(0)), (Fr(1), Fr(1)))
    assert bounding_box(B) is B


def test_unit_ball_volumes():
    assert unit_ball_volume(0) == 1
    assert unit_ball_volume(1) == 2
    assert math.isclose(unit_ball_volume(2), math.pi)
    assert math.isclose(unit_ball_volume(3), 4 * math.pi / 3)
    assert math.isclose(unit_ball_volume(5), 8 * math.pi ** 2 / 15)
    with pytest.raises(ValueError):
        unit_ball_volume(-1)


def test_ellipsoid_slice_examples():
    assert slice_volume_ellipsoid(DISK, [0, 0], X_AXIS) == 2.0
    assert slice_volume_ellipsoid(DISK, [1, 0], X_AXIS) == 0.0
    assert math.isclose(slice_volume_ellipsoid(ball([0, 0, 0], 1), [0, 0, 0], Z_AXIS), math.pi)
    assert math.isclose(slice_volume_ellipsoid(DISK, [Fr(1, 2), 0], X_AXIS), 2 * math.sqrt(3 / 4))


def test_slice_with_irrational_center():
    E = ball([parse_scalar("1/2*sqrt(2)"), 0], 1)
    assert math.isclose(slice_volume_ellipsoid(E, [0, 0], X_AXIS), 2 * math.sqrt(1 / 2))


def test_box_slices():
    cube = Box((Fr(-1),) * 3, (Fr(1),) * 3)
    xy = build_subspace([[1, 0, 0], [0, 1, 0]], 3)  # fiber is a vertical line
    assert math.isclose(slice_volume_box(cube, [0, 0, 0], xy), 2.0)
    plane = build_subspace([[1, -1, 0], [1, 0, -1]], 3)  # fiber is the main diagonal
    assert math.isclose(slice_volume_box(cube, [0, 0, 0], plane), 2 * math.sqrt(3), rel_tol=1e-9)
    line = build_subspace([[1, 1, 1]], 3)  # fiber is the plane orthogonal to (1,1,1)
    # central hexagonal section of the cube [-1, 1]^3
    assert math.isclose(slice_volume_box(cube, [0, 0, 0], line), 3 * math.sqrt(3), rel_tol=1e-9)
    assert slice_volume_box(cube, [2, 2, 2], line) == 0.0
    # fibers in a face of the open cube are empty
    assert slice_volume_box(cube, [0, 0, 1], xy) == 2.0
    assert slice_volume_box(cube, [1, 0, 0], xy) == 0.0
    assert slice_volume_box(cube, [0, -1, 0], build_subspace([[0, 1, 0]], 3)) == 0.0


def test_mc_examples():
    est, err = slice_volume_mc(DISK.as_oracle(), [0, 0], X_AXIS, samples=10**6, seed=1)
    assert abs(est - 2) <= 3 * err + 1e-12
    est, err = slice_volume_mc(ball([0, 0, 0], 1).as_oracle(), [0, 0, 0], Z_AXIS, samples=10**6, seed=2)
    assert abs(est - math.pi) <= 3 * err
    assert slice_volume_mc(DISK.as_oracle(), [5, 0], X_AXIS) == (0.0, 0.0)


def test_mc_is_deterministic_and_chunk_independent():
    a = slice_volume_mc(DISK.as_oracle(), [0, 0], build_subspace([], 2), samples=10**5, seed=3)
    b = slice_volume_mc(DISK.as_oracle(), [0, 0], build_subspace([], 2), samples=10**5, seed=3)
    assert a == b
    c = slice_volume_mc(DISK.as_oracle(), [0, 0], build_subspace([], 2), samples=10**5, seed=3, chunk=1 << 12)
    d = slice_volume_mc(DISK.as_oracle(), [0, 0], build_subspace([], 2), samples=10**5, seed=3, chunk=1 << 12)
    assert c == d


@st.composite
def nested_ellipsoids(draw):
    a = draw(st.integers(1, 6))
    b = draw(st.integers(1, 6))
    c = draw(st.integers(-2, 2))
    # M = [[a+|c|, c], [c, b+|c|]] is positive definite; adding a PSD part shrinks the set
    M = ((a + abs(c), c), (c, b + abs(c)))
    extra = draw(st.integers(0, 3))
    M2 = ((M[0][0] + extra, M[0][1]), (M[1][0], M[1][1] + extra))
    return Ellipsoid((0, 0), M), Ellipsoid((0, 0), M2)


@settings(max_examples=40, deadline=None)
@given(nested_ellipsoids(), st.fractions(min_value=-2, max_value=2, max_denominator=7))
def test_slice_monotone_under_nesting(pair, t):
    big, small = pair
    S = build_subspace([[1, Fr(1, 2)]], 2)
    g = [2 * t, t]  # a point of V = span{(2, 1)}
    assert slice_volume_ellipsoid(small, g, S) <= slice_volume_ellipsoid(big, g, S) + 1e-12


def test_superellipsoid_oracle():
    D = superellipsoid([0, 0], [1, 1], power=4)
    assert contains(D, [Fr(9, 10), 0])
    assert not contains(D, [Fr(11, 10), 0])
    v, _ = slice_volume(D, [0, 0], X_AXIS, samples=10**5, seed=0)
    assert abs(v - 2) < 0.05


def test_json_round_trip():
    for D in [DISK, Ellipsoid((Fr(1, 2), 0), ((2, 1), (1, 3))), Box((Fr(-1), Fr(0)), (Fr(1), Fr(1, 2)))]:
        obj = domain_to_json(D)
        assert domain_from_json(obj) == D
    obj = {"type": "superellipsoid", "center": ["0", "0"], "radii": ["1", "2"], "power": 4}
    assert domain_to_json(domain_from_json(obj)) == obj


def test_invalid_domains():
    with pytest.raises(ValueError):
        Ellipsoid((0, 0), ((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        Ellipsoid((0, 0), ((1, 0), (1, 1)))
    with pytest.raises(ValueError):
        ball([0, 0], 0)
    with pytest.raises(ValueError):
        domain_from_json({"type": "torus"})
