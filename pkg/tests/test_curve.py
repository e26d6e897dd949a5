import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from ellpsp.curve import (
    CM_TABLE, CapExceeded, Curve, PointClass, add, add_affine_attempt, classify, cm_disc_for, group,
    identity, lift_points, make_point, neg, on_curve, point_order, points, prime_power_points,
    rational_torsion_order, reduce_point, reduce_rational_point, scalar_mul, snz_dominator,
    snz_reachable,
)
from ellpsp.modarith import FactorFound, Factorization

from conftest import AXIOM_CURVES, STRUCTURE_CURVES
from oracles import affine_points, count_prime_power_points, fp_add


def test_curve_basics():
    E = Curve(-1, 0)
    assert E.disc_core == -4
    assert E.discriminant == 64
    assert E.rhs(2) == 6
    assert E.has_good_reduction(5) and not E.has_good_reduction(2)
    assert E.reduced(5) == Curve(4, 0)
    assert Curve(1, 1, 3).as_dict() == {"A": 1, "B": 1, "d": 3}


def test_singular_curve_rejected_at_pairing():
    E = Curve(-3, 2)
    assert E.disc_core == 0
    with pytest.raises(ValueError):
        group(E, 35)


def test_cm_table():
    assert cm_disc_for(-1, 0) == 1
    assert cm_disc_for(0, 2) == 3
    assert cm_disc_for(1, 1) is None
    assert all(E.cm_disc in (1, 3) for E in CM_TABLE.values())


def test_classification():
    n = 35
    P = make_point(Curve(1, 1), n, 0, 1)
    assert classify(P) is PointClass.STRONGLY_NON_ZERO and P.z == 1
    assert classify(identity(n)) is PointClass.ZERO
    G = group(Curve(1, 1), 35)
    middle = [P for P in G.points() if classify(P) is PointClass.NON_ZERO_NOT_STRONG]
    # one component at infinity, the other affine
    assert len(middle) == (G.locals[0].order() - 1) + (G.locals[1].order() - 1)
    for P in middle:
        assert 1 < gcd(P.z, n) < n


def test_make_point_canonicalizes_and_validates():
    E = Curve(1, 1)
    P = make_point(E, 35, 0, 1)
    assert make_point(E, 35, 0, 2, 2) == P
    with pytest.raises(ValueError):
        make_point(E, 35, 1, 1)
    with pytest.raises(ValueError):
        make_point(E, 35, 0, 5, 0)


def test_point_serialization():
    P = make_point(Curve(1, 1), 35, 0, 1)
    assert P.as_dict() == {"x": 0, "y": 1, "z": 1, "n": 35}
    assert str(P) == "0:1:1 mod 35"


def test_rational_points():
    E = Curve(-25, 0)
    P = reduce_rational_point(E, 35, -4, 6)
    assert (P.x, P.y, P.z) == (31, 6, 1)
    assert rational_torsion_order(E, -4, 6) is None
    assert rational_torsion_order(Curve(-1, 0), 0, 0) == 2
    assert rational_torsion_order(Curve(0, 2), -1, 1) is None
    # y^2 = x^3 + 1 has the point (2, 3) of order 6
    assert rational_torsion_order(Curve(0, 1), 2, 3) == 6
    Q = reduce_rational_point(Curve(0, 2), 35, "17/4", "-71/8")  # 2 * (-1, 1)
    assert Q == scalar_mul(Curve(0, 2), 35, 2, reduce_rational_point(Curve(0, 2), 35, -1, 1))
    with pytest.raises(ValueError):
        reduce_rational_point(E, 35, 1, 1)


def test_modulus_restrictions():
    with pytest.raises(ValueError):
        group(Curve(1, 1), 45)
    with pytest.raises(ValueError):
        group(Curve(1, 1), 14)
    # y^2 = x^3 + x + 1 has 4A^3 + 27B^2 = 31
    with pytest.raises(ValueError):
        group(Curve(1, 1), 31 * 5)


@pytest.mark.parametrize("N", [15, 35])
@pytest.mark.parametrize("E", AXIOM_CURVES, ids=str)
def test_group_axioms_exhaustive(E, N):
    if gcd(N, E.disc_core) != 1:
        pytest.skip("bad reduction")
    G = group(E, N)
    pts = G.points()
    O = G.identity
    assert len(pts) == G.order() == len(set(pts))
    for P in pts:
        assert G.contains(P)
        assert G.add(P, O) == P == G.add(O, P)
        assert G.add(P, G.neg(P)) == O
    for P, Q in itertools.product(pts, repeat=2):
        assert G.add(P, Q) == G.add(Q, P)
    table = {(P, Q): G.add(P, Q) for P in pts for Q in pts}
    for P, Q, R in itertools.product(pts, repeat=3):
        assert table[table[P, Q], R] == table[P, table[Q, R]]


def test_curve_group_at_15_is_exercised():
    # the parametrized axioms test must not skip everything at 15
    assert sum(gcd(15, E.disc_core) == 1 for E in AXIOM_CURVES) >= 3
    assert sum(gcd(35, E.disc_core) == 1 for E in AXIOM_CURVES) >= 3


@pytest.mark.parametrize("p", [5, 7])
def test_group_axioms_prime_square(p):
    E = STRUCTURE_CURVES[p][1]
    G = group(E, p * p)
    pts = G.points()
    rng = random.Random(p)
    O = G.identity
    for P in pts:
        assert G.add(P, G.neg(P)) == O
    for _ in range(3000):
        P, Q, R = rng.choice(pts), rng.choice(pts), rng.choice(pts)
        assert G.add(G.add(P, Q), R) == G.add(P, G.add(Q, R))
        assert G.add(P, Q) == G.add(Q, P)
        assert G.contains(G.add(P, Q))


@pytest.mark.parametrize("p", [5, 7, 11])
def test_prime_square_order_by_brute_force(p):
    for E in [Curve(1, 1), Curve(2, 3), Curve(-1, 0)]:
        if not E.has_good_reduction(p):
            continue
        expected = count_prime_power_points(E.a, E.b, p, 2)
        assert len(prime_power_points(E, p, 2)) == expected == p * (len(affine_points(E.a % p, E.b % p, p)))
        assert group(E, p * p).order() == expected


def test_points_match_naive_field_arithmetic():
    p, E = 13, Curve(2, 3)
    G = group(E, p)
    naive = affine_points(2, 3, p)
    assert len(naive) == G.order()
    for P, Q in itertools.product(naive, repeat=2):
        def lift(T):
            return G.identity if T is None else G.point(*T)
        assert G.add(lift(P), lift(Q)) == lift(fp_add(P, Q, 2, p))


def test_module_level_wrappers():
    E = Curve(1, 1)
    P = make_point(E, 35, 0, 1)
    assert add(E, 35, P, neg(E, 35, P)) == identity(35)
    k = point_order(E, 35, P)
    assert scalar_mul(E, 35, k, P).is_identity()
    assert not scalar_mul(E, 35, k - 1, P).is_identity()
    assert scalar_mul(E, 35, -1, P) == neg(E, 35, P)
    assert len(points(E, 35)) == group(E, 35).order()
    with pytest.raises(CapExceeded):
        points(E, 35, cap=10)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([15, 35, 55, 77, 91, 143]), st.integers(0, 10**6))
def test_add_agrees_with_affine_path(N, seed):
    rng = random.Random(seed)
    E = rng.choice([Curve(1, 1), Curve(2, 3), Curve(-1, 0), Curve(0, 2)])
    if gcd(N, E.disc_core) != 1:
        return
    strong = group(E, N).strong_points()
    P, Q = rng.choice(strong), rng.choice(strong)
    try:
        R = add_affine_attempt(E, N, P, Q)
    except FactorFound as exc:
        assert 1 < exc.factor < N and N % exc.factor == 0
        return
    assert R == add(E, N, P, Q)


def test_affine_path_exposes_factor():
    E = Curve(1, 0)
    P = make_point(E, 35, 15, 10)
    with pytest.raises(FactorFound) as info:
        add_affine_attempt(E, 35, P, P)
    assert info.value.factor == 5
    # the CRT law is total: 2P mod 5 is the identity, mod 7 it is affine
    D = add(E, 35, P, P)
    assert classify(D) is PointClass.NON_ZERO_NOT_STRONG
    assert reduce_point(D, 5).is_identity()


def test_reduce_point_keeps_canonical_form():
    E = Curve(3, 2)
    for Q in prime_power_points(E, 5, 2):
        R = reduce_point(Q, 5)
        assert on_curve(E, 5, R.x, R.y, R.z)
        assert make_point(E, 5, R.x, R.y, R.z) == R
    with pytest.raises(ValueError):
        reduce_point(identity(25), 7)


# ---------------------------------------------------------------------------
# Structure of E(Z/p^n Z) for p in {5, 7} and n = 2, checked exhaustively.

STRUCTURE_CASES = [(p, E) for p, curves in STRUCTURE_CURVES.items() for E in curves]
CASE_IDS = [f"p{p}-{E}" for p, E in STRUCTURE_CASES]


def _brute(E, m):
    G = group(E, m)
    pts = G.points()
    strong = [P for P in pts if P.is_strong()]
    return G, pts, strong


def test_structure_fixtures_cover_every_case():
    for p, (split, cyclic, ordinary) in STRUCTURE_CURVES.items():
        assert group(split, p).order() == p == group(cyclic, p).order()
        assert group(ordinary, p).order() != p
        split_torsion = sum(group(split, p * p).mul(p, P).is_identity() for P in group(split, p * p).points())
        cyclic_torsion = sum(group(cyclic, p * p).mul(p, P).is_identity() for P in group(cyclic, p * p).points())
        assert (split_torsion, cyclic_torsion) == (p * p, p)


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_reduction_detects_kernel(p, E):
    # Q mod p^2 is zero exactly when it reduces to zero mod p.  A kernel
    # point (x:1:z) has p | x, so z = x^3 + ... vanishes mod p^2: the p
    # kernel points are all zero, and only one of them is the identity.
    _, pts, _ = _brute(E, p * p)
    for Q in pts:
        below = reduce_point(Q, p)
        assert (classify(below) is PointClass.ZERO) == (classify(Q) is PointClass.ZERO)
        assert classify(Q) is not PointClass.NON_ZERO_NOT_STRONG
    kernel = [Q for Q in pts if not Q.is_strong()]
    assert len(kernel) == p
    assert sum(Q.is_identity() for Q in kernel) == 1


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_kernel_points_have_p_power_order(p, E):
    G, pts, _ = _brute(E, p * p)
    for Q in pts:
        if Q.is_strong() or Q.is_identity():
            continue
        assert G.point_order(Q) == p


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_order_coprime_multiple_reaches_kernel_iff_order_divides(p, E):
    G, pts, strong = _brute(E, p * p)
    for Q in pts:
        if Q.is_strong():
            continue
        for k in [k for k in range(1, 5 * p) if k % p]:
            reached = any(G.mul(k, P) == Q for P in strong)
            small = any(k % G.point_order(P) == 0 for P in strong)
            assert reached == small


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_each_point_lifts_to_exactly_p_points(p, E):
    lifted = []
    for Q in prime_power_points(E, p, 1):
        above = lift_points(E, p, 2, Q)
        assert len(above) == p
        for R in above:
            assert reduce_point(R, p) == Q
            assert on_curve(E, p * p, R.x, R.y, R.z)
        lifted.extend(above)
    assert len(set(lifted)) == count_prime_power_points(E.a, E.b, p, 2)
    assert set(lifted) == set(prime_power_points(E, p, 2))


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_reachability_matches_brute_force(p, E):
    G, pts, strong = _brute(E, p * p)
    n = G.order()
    reachable = {G.mul(k, P) for P in strong for k in range(n)}
    for Q in pts:
        if not Q.is_strong():
            assert snz_reachable(E, p, 2, Q) == (Q in reachable)
    with pytest.raises(ValueError):
        snz_reachable(E, p, 2, strong[0])


def test_reachability_fails_somewhere_in_split_case():
    # in the split anomalous case the kernel points of order p are not
    # multiples of strongly non-zero points
    for p, (split, _, _) in STRUCTURE_CURVES.items():
        G = group(split, p * p)
        assert not any(snz_reachable(split, p, 2, Q) for Q in G.points() if not Q.is_identity() and not Q.is_strong())


@pytest.mark.parametrize("p,E", STRUCTURE_CASES, ids=CASE_IDS)
def test_kernel_orders_are_dominated(p, E):
    G, pts, strong = _brute(E, p * p)
    strong_orders = [G.point_order(P) for P in strong]
    for Q in pts:
        if Q.is_strong():
            continue
        q = G.point_order(Q)
        assert any(o % q == 0 for o in strong_orders)
        P = snz_dominator(E, p * p, Q)
        assert P.is_strong() and G.point_order(P) % q == 0


@pytest.mark.parametrize("N", [35, 175, 245])
@pytest.mark.parametrize("E", [Curve(1, 1), Curve(3, 2), Curve(3, 5)], ids=str)
def test_dominator_across_components(E, N):
    G = group(E, N)
    for Q in G.points():
        if Q.is_strong():
            continue
        P = snz_dominator(E, N, Q)
        assert P.is_strong()
        assert G.point_order(P) % G.point_order(Q) == 0


@pytest.mark.parametrize("N", [35, 175])
def test_classes_through_components(N):
    # strongly non-zero exactly when every component is; zero exactly when
    # every component is
    E = Curve(1, 1)
    F = Factorization.of(N)
    for Q in group(E, N).points():
        parts = [reduce_point(Q, m) for m in F.prime_powers]
        assert Q.is_strong() == all(R.is_strong() for R in parts)
        assert (classify(Q) is PointClass.ZERO) == all(classify(R) is PointClass.ZERO for R in parts)


def test_one_zero_component_does_not_make_a_zero_point():
    E = Curve(1, 1)
    G = group(E, 35)
    Q = G.join([(0, 1, 0), G.split(G.strong_points()[0])[1]])
    assert classify(reduce_point(Q, 5)) is PointClass.ZERO
    assert classify(Q) is PointClass.NON_ZERO_NOT_STRONG
