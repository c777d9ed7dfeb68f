import random

import pytest

from heisgrad.abelian import (AbGroup, AbPresentation, canonicalize, generates,
                              group_product, smith_normal_form,
                              subgroup_presentation)


def det(m):
    # Bareiss fraction-free determinant for the unimodularity checks
    n = len(m)
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def mat_mul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b)))
             for j in range(len(b[0]))] for i in range(len(a))]


def check_snf(a):
    u, d, v = smith_normal_form(a)
    assert mat_mul(mat_mul(u, a), v) == d
    assert abs(det(u)) == 1
    assert abs(det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    for i in range(len(d)):
        for j in range(len(d[0]) if d else 0):
            if i != j:
                assert d[i][j] == 0
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    return diag


def test_snf_examples():
    assert check_snf([[2, 0], [0, 3]]) == [1, 6]
    u, d, v = smith_normal_form([[0, 0], [0, 0]])
    assert d == [[0, 0], [0, 0]]
    assert u == [[1, 0], [0, 1]] and v == [[1, 0], [0, 1]]
    assert check_snf([[2, 4], [6, 8]]) == [2, 4]


def test_snf_random_sweep():
    rng = random.Random(20240)
    for _ in range(500):
        rows = rng.randint(1, 8)
        cols = rng.randint(1, 8)
        a = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        check_snf(a)


def test_canonicalize_free():
    g, images = canonicalize(AbPresentation(2, ()))
    assert g == AbGroup(2, ())
    assert len(images) == 2


def test_canonicalize_twisted_natural_group():
    # generators u, z, e1 with relations 2u = 0 and 2e1 = z + u
    g, images = canonicalize(AbPresentation(3, ((2, 0, 0), (-1, -1, 2))))
    assert g == AbGroup(1, (2,))


def test_canonicalize_super_relations():
    # generators z, e, ehat, u, v, t with e+ehat = u+v = 2t = z
    rels = ((-1, 1, 1, 0, 0, 0), (-1, 0, 0, 1, 1, 0), (-1, 0, 0, 0, 0, 2))
    g, images = canonicalize(AbPresentation(6, rels))
    assert g == AbGroup(3, ())
    # the original relations hold on the images
    z, e, eh, u, v, t = images
    assert e + eh == z and u + v == z and 2 * t == z


def test_presentation_invariance():
    rels = [(2, 0, 0), (-1, -1, 2)]
    base, _ = canonicalize(AbPresentation(3, tuple(rels)))
    redundant = rels + [tuple(2 * a - b for a, b in zip(rels[0], rels[1]))]
    again, _ = canonicalize(AbPresentation(3, tuple(redundant)))
    assert base == again


def test_group_product_canonicalizes():
    g, gens = group_product([0, 2, 4, 2])
    assert g == AbGroup(1, (2, 2, 4))
    assert str(g) == "Z x Z_2 x Z_2 x Z_4"
    g2, _ = group_product([2, 3])
    assert g2 == AbGroup(0, (6,))


def test_element_arithmetic():
    g, gens = group_product([0, 2])
    a = g.elt((0,), (1,))
    assert a.order() == 2
    assert (a + a) == g.zero()
    b = g.elt((1,), (0,))
    assert b.order() is None
    assert (b - b) == g.zero()
    assert (3 * b).free == (3,)


def test_cross_group_arithmetic_is_error():
    g1, _ = group_product([0])
    g2, _ = group_product([0, 0])
    with pytest.raises(ValueError):
        g1.zero() + g2.zero()


def test_torsion_free():
    assert AbGroup(3, ()).is_torsion_free()
    assert not AbGroup(1, (2,)).is_torsion_free()


def test_order_of_element():
    g, _ = group_product([0, 2, 4])
    e = g.elt((0,), (1, 2))
    assert e.order() == 2
    e2 = g.elt((0,), (1, 1))
    assert e2.order() == 4


def test_generates():
    g, gens = group_product([0, 2])
    assert generates(g, gens)
    assert not generates(g, [g.elt((2,), (0,)), g.elt((0,), (1,))])
    assert generates(g, [g.elt((1,), (1,)), g.elt((0,), (1,))])


def test_subgroup_presentation():
    g, _ = group_product([0, 0])
    elts = [g.elt((2, 0), ()), g.elt((0, 3), ())]
    sub, _ = canonicalize(subgroup_presentation(g, elts))
    assert sub == AbGroup(2, ())
    # index-2 sublattice spanned by (1,1) and (1,-1)
    elts = [g.elt((1, 1), ()), g.elt((1, -1), ())]
    sub, _ = canonicalize(subgroup_presentation(g, elts))
    assert sub == AbGroup(2, ())
    gt, _ = group_product([4])
    sub, _ = canonicalize(subgroup_presentation(gt, [gt.elt((), (2,))]))
    assert sub == AbGroup(0, (2,))


def test_str_forms():
    assert str(AbGroup(0, ())) == "1"
    assert str(AbGroup(1, ())) == "Z"
    assert str(AbGroup(0, (5,))) == "Z_5"
