import math
import random
from fractions import Fraction

import pytest

from xsplanes.planes import (
    MeshStrip,
    Plane,
    component_count,
    family,
    mesh,
    min_dist,
    torus_dist,
)


def test_family_a23_coefficients():
    fam = family(23)
    assert len(fam.planes) == 8
    assert {p.m for p in fam.planes} == {8388607, 8388609}


def test_family_a1_coefficients():
    assert {p.m for p in family(1).planes} == {1, 3}


@pytest.mark.parametrize("a", [1, 8, 23, 62])
def test_family_always_eight_unique(a):
    fam = family(a)
    assert len(set(fam.planes)) == 8


def test_family_enumeration_order():
    fam = family(3)
    names = [p.name for p in fam.planes]
    assert names == [
        "m7_pp", "m7_pn", "m7_np", "m7_nn",
        "m9_pp", "m9_pn", "m9_np", "m9_nn",
    ]


def test_family_range():
    with pytest.raises(ValueError):
        family(0)
    with pytest.raises(ValueError):
        family(63)


def test_plane_validates_signs():
    with pytest.raises(ValueError):
        Plane(3, 2, 1)
    with pytest.raises(ValueError):
        Plane(0, 1, 1)


def test_torus_dist_on_plane_at_x0():
    # at x = 0 any (+,+) plane degenerates to z = y
    for m in (3, 8388609):
        assert torus_dist((0.0, 0.25, 0.25), Plane(m, 1, 1)) == 0.0


def test_torus_dist_folds():
    # residue 0.75 folds to distance 0.25
    assert torus_dist((0.0, 0.0, 0.75), Plane(1, 1, 1)) == 0.25


def test_torus_dist_extended_precision_point():
    # construct a point on z = -(2^23+1)x + y (mod 1) with exact rational
    # arithmetic, then measure in binary64
    m = (1 << 23) + 1
    rng = random.Random(61)
    for _ in range(50):
        x = Fraction(rng.getrandbits(30), 1 << 53)
        y = Fraction(rng.getrandbits(53), 1 << 53)
        z = (-m * x + y) % 1
        d = torus_dist((float(x), float(y), float(z)), Plane(m, -1, 1))
        assert d <= 2.0**-40


def test_torus_dist_periodic_in_z():
    rng = random.Random(62)
    plane = Plane(9, 1, -1)
    for _ in range(200):
        x, y, z = rng.random(), rng.random(), rng.random()
        d1 = torus_dist((x, y, z), plane)
        d2 = torus_dist((x, y, (z + 1.0) % 1.0), plane)
        assert abs(d1 - d2) < 1e-12


def test_min_dist_on_plane():
    fam = family(23)
    plane = fam.planes[5]
    x, y = 2.0**-25, 0.375
    p = (x, y, plane.height(x, y))
    d, which = min_dist(p, fam)
    assert d <= 2.0**-40
    assert which == plane


def test_min_dist_codomain():
    fam = family(5)
    rng = random.Random(63)
    for _ in range(500):
        d, which = min_dist((rng.random(), rng.random(), rng.random()), fam)
        assert 0.0 <= d <= 0.5
        assert which in fam.planes


def test_min_dist_tie_break_is_first_in_order():
    fam = family(23)
    # at (0, 0, 0.5) every sign_y=+1 plane is at the max distance 1/2;
    # the arg-min must be the first plane in enumeration order
    d, which = min_dist((0.0, 0.0, 0.5), fam)
    assert d == 0.5
    assert which == fam.planes[0]


def test_uniform_hit_rate_respects_union_bound():
    # Monte Carlo fraction within eps of the family stays under the
    # 16*eps union bound plus binomial noise
    fam = family(23)
    eps = 2.0**-8
    rng = random.Random(64)
    trials = 20000
    hits = sum(
        min_dist((rng.random(), rng.random(), rng.random()), fam)[0] <= eps
        for _ in range(trials)
    )
    bound = 16 * eps
    sigma = math.sqrt(bound * (1 - bound) / trials)
    assert hits / trials <= bound + 3 * sigma


def test_coefficient_pair_planes_close_on_slab():
    # on the slab x <= 2^-23 the two coefficient choices differ vertically
    # by exactly 2x, at most 2^-22
    x_max = 2.0**-23
    lo = Plane((1 << 23) - 1, 1, 1)
    hi = Plane((1 << 23) + 1, 1, 1)
    worst = 0.0
    for j in range(101):
        x = x_max * j / 100
        p = (x, 0.5, hi.height(x, 0.5))
        worst = max(worst, torus_dist(p, lo))
    assert worst <= 2 * x_max + 1e-15


@pytest.mark.parametrize("plane_idx", range(8))
def test_mesh_two_components_per_plane(plane_idx):
    fam = family(23)
    strips = mesh(fam.planes[plane_idx], 2.0**-23, 2.0**23, 64)
    assert component_count(strips) == 2


def test_mesh_vertices_accounting():
    strips = mesh(Plane(9, 1, 1), 2.0**-3, 2.0**3, 32)
    total = sum(len(s.vertices) for s in strips)
    # every grid vertex appears at most once; wrap splits may drop a few
    assert 32 * 32 - 2 * 32 <= total <= 32 * 32
    for s in strips:
        assert len(s.vertices) >= 2
        for x_mag, y, z in s.vertices:
            assert 0.0 <= x_mag <= 1.0
            assert 0.0 <= y <= 1.0
            assert 0.0 <= z < 1.0


def test_mesh_y0_row_spans_unit_interval():
    # along y = 0 the (+,-) plane reduces to z = frac(m*x), which sweeps
    # [0, 1) once across the slab and wraps to 2^-23 at x = 2^-23
    plane = Plane((1 << 23) + 1, 1, -1)
    heights = [plane.height((j / 63) * 2.0**-23, 0.0) for j in range(64)]
    assert heights[0] == 0.0
    assert max(heights) > 0.95
    assert plane.height(2.0**-23, 0.0) == pytest.approx(2.0**-23, abs=1e-18)
    wraps = sum(heights[i + 1] < heights[i] - 0.5 for i in range(63))
    assert wraps == 1


def test_mesh_strip_geometry():
    strips = mesh(Plane(3, 1, 1), 0.5, 2.0, 8)
    # strips are vertical in x_mag and ordered by y
    for s in strips:
        xs = {v[0] for v in s.vertices}
        assert len(xs) == 1
        ys = [v[1] for v in s.vertices]
        assert ys == sorted(ys)


def test_mesh_validates():
    with pytest.raises(ValueError):
        mesh(Plane(3, 1, 1), 0.0, 2.0, 8)
    with pytest.raises(ValueError):
        mesh(Plane(3, 1, 1), 0.5, -1.0, 8)
    with pytest.raises(ValueError):
        mesh(Plane(3, 1, 1), 0.5, 2.0, 1)


def test_component_count_helper():
    strips = [
        MeshStrip(0, ((0.0, 0.0, 0.1), (0.0, 0.5, 0.6))),
        MeshStrip(1, ((0.0, 0.6, 0.1), (0.0, 1.0, 0.5))),
        MeshStrip(0, ((0.5, 0.0, 0.3), (0.5, 0.5, 0.8))),
    ]
    assert component_count(strips) == 2
