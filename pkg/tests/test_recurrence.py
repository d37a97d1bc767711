"""Return sets, dual-family classification, constructive coloring search."""

import random
from fractions import Fraction as F

import pytest

from ipstar.algebra import (
    DegreeWindow,
    FullWindow,
    Monomial,
    PolyRing,
    PolynomialMap,
    PrimeField,
    RationalWindow,
    Rationals,
    VectorSpace,
    scalar_poly_map,
)
from ipstar.ipsets import finite_sums
from ipstar.recurrence import (
    RecurrenceError,
    SyndeticityReport,
    classify_ipstar,
    commuting_recurrence_search,
    fp_probe,
    isometric_recurrence_search,
    recurrence_set,
    reports_agree,
    syndeticity_check,
    theorem1_pipeline,
    verify_gamma_distance,
)
from ipstar.systems import (
    BernoulliSystem,
    FinitePermSystem,
    RotationSystem,
    regular_system,
)

F5 = PrimeField(5)
Q = Rationals()
R2 = PolyRing(2)


def power_map(ring, coeff, degree):
    return scalar_poly_map(ring, [Monomial(ring, coeff, (degree,))])


SQUARE_5 = power_map(F5, 1, 2)
IDENT_P2 = power_map(R2, (1,), 1)


# ---------------------------------------------------------------------------
# return sets


def test_recurrence_set_full_f5():
    s = regular_system(5)
    rep = recurrence_set(s, {0, 1}, SQUARE_5, F(1, 100), FullWindow())
    assert rep.R.members == frozenset(range(5))
    assert rep.mu == F(2, 5) and rep.threshold == F(3, 20)
    assert rep.khintchine == F(2, 5)
    assert rep.outside_hypotheses
    # correlations behind the verdict: 2/5 at 0, 1/5 on every other square
    corr = {u: c for u, _, c, _ in rep.rows}
    assert corr[0] == F(2, 5) and corr[1] == F(1, 5) and corr[2] == F(1, 5)


def test_recurrence_set_singleton_f5():
    s = regular_system(5)
    rep = recurrence_set(s, {0}, SQUARE_5, F(1, 50), FullWindow())
    assert rep.R.members == frozenset({0})
    assert all((c == F(1, 5)) == (u == 0) for u, _, c, _ in rep.rows)


def test_recurrence_set_bernoulli_full_window():
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    rep = recurrence_set(b, {(): {0}}, IDENT_P2, F(1, 1000), DegreeWindow(4))
    assert rep.R.members == frozenset(rep.elements)
    assert len(rep.elements) == 16
    assert rep.windowed


def test_recurrence_set_zero_always_in_R():
    rng = random.Random(20260827)
    s = regular_system(7)
    F7 = PrimeField(7)
    for _ in range(30):
        B = {x for x in range(7) if rng.random() < 0.5}
        phi = power_map(F7, rng.randrange(1, 7), rng.randrange(1, 4))
        eps = F(1, rng.randrange(2, 200))
        rep = recurrence_set(s, B, phi, eps, FullWindow())
        assert 0 in rep.R.members


def test_recurrence_set_epsilon_monotone():
    rng = random.Random(20260828)
    s = regular_system(7)
    F7 = PrimeField(7)
    for _ in range(30):
        B = {x for x in range(7) if rng.random() < 0.5}
        phi = power_map(F7, rng.randrange(1, 7), rng.randrange(1, 3))
        e1 = F(rng.randrange(1, 50), 100)
        e2 = e1 + F(rng.randrange(0, 50), 100)
        r1 = recurrence_set(s, B, phi, e1, FullWindow())
        r2 = recurrence_set(s, B, phi, e2, FullWindow())
        assert r1.R.members <= r2.R.members


def test_recurrence_set_rejections():
    s = regular_system(5)
    with pytest.raises(RecurrenceError, match="positive"):
        recurrence_set(s, {0}, SQUARE_5, F(0), FullWindow())
    with pytest.raises(RecurrenceError, match="does not match"):
        recurrence_set(s, {0}, IDENT_P2, F(1, 10), DegreeWindow(2))


# ---------------------------------------------------------------------------
# classification


def test_classify_full_f5_holds_all_r():
    s = regular_system(5)
    rep = classify_ipstar(recurrence_set(s, {0, 1}, SQUARE_5, F(1, 100), FullWindow()), 4)
    assert all(rep.classification[r].holds for r in range(1, 5))
    assert not any(rep.classification[r].window_limited for r in range(1, 5))
    assert rep.exceptional == ()


def test_classify_singleton_fails_with_checked_witness():
    s = regular_system(5)
    rep = classify_ipstar(recurrence_set(s, {0}, SQUARE_5, F(1, 50), FullWindow()), 2)
    v = rep.classification[2]
    assert v.kind == "fails" and v.witness == (1, 1)
    # the witness really generates sums that all avoid R
    sums = finite_sums(F5, v.witness).members
    assert sums == {1, 2} and not sums & rep.R.members


def test_classify_bernoulli_window_limited():
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    rep = classify_ipstar(recurrence_set(b, {(): {0}}, IDENT_P2, F(1, 10), DegreeWindow(3)), 3)
    for r in range(1, 4):
        v = rep.classification[r]
        assert v.holds and v.window_limited
    assert rep.exceptional == ()
    assert rep.exceptional_density.values == (F(0),) * 6


def test_classify_budget_partial():
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    rep = recurrence_set(b, {(): {0}}, IDENT_P2, F(1, 10), DegreeWindow(3))
    rep = classify_ipstar(rep, 3, budget=3)
    assert rep.classification[1].kind == "budget_exceeded"
    assert 2 not in rep.classification


def test_classify_exceptional_density_two_coordinate_cylinder():
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    B = {(): {0}, (0, 1): {1}}
    rep = classify_ipstar(
        recurrence_set(b, B, IDENT_P2, F(1, 100), DegreeWindow(3)), 2, density_N=4
    )
    # only the shift by t collides the two constraints into a contradiction
    assert rep.exceptional == ((0, 1),)
    assert rep.exceptional_density.values == (F(0), F(1, 4), F(1, 8), F(1, 16))


# ---------------------------------------------------------------------------
# pipeline and agreement


def test_pipeline_finite_perm_A_subset_R_E_empty():
    s = regular_system(5)
    rep = theorem1_pipeline(s, {0, 1}, SQUARE_5, F(1, 100), FullWindow(), 2)
    assert rep.chain_checked
    assert rep.E == ()
    assert set(rep.A) <= rep.R.members
    assert 0 in rep.A


def test_pipeline_bernoulli_A_window_E_finite():
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    B = {(): {0}, (0, 1): {1}}
    rep = theorem1_pipeline(b, B, IDENT_P2, F(1, 100), DegreeWindow(3), 2)
    assert rep.A == rep.elements  # constant part never moves
    assert rep.E == ((0, 1),)  # cross term dips exactly where letters clash
    assert set(rep.A) - set(rep.E) <= rep.R.members


def test_pipeline_rotation_matches_direct_scan():
    r = RotationSystem(F(1, 6))
    B = [(F(0), F(1, 2))]
    phi = power_map(Q, F(1), 1)
    win = RationalWindow(3, 2)
    a = recurrence_set(r, B, phi, F(1, 10), win)
    b = theorem1_pipeline(r, B, phi, F(1, 10), win, 2)
    assert reports_agree(a, b)
    assert a.R.members != frozenset(a.elements)  # half-turn shifts fall out


def test_two_path_agreement_randomized():
    rng = random.Random(20260829)
    s = regular_system(7)
    F7 = PrimeField(7)
    rot = RotationSystem(F(2, 9))
    ber = BernoulliSystem(2, [F(1, 3), F(2, 3)])
    for _ in range(17):
        B = {x for x in range(7) if rng.random() < 0.5}
        phi = power_map(F7, rng.randrange(1, 7), rng.randrange(1, 3))
        eps = F(rng.randrange(1, 40), 40)
        assert reports_agree(
            recurrence_set(s, B, phi, eps, FullWindow()),
            theorem1_pipeline(s, B, phi, eps, FullWindow(), 1),
        )
    for _ in range(17):
        a = F(rng.randrange(0, 9), 9)
        b = a + F(rng.randrange(1, 5), 9)
        B = [(a, b if b <= 1 else b - 1)]
        phi = power_map(Q, F(rng.randrange(1, 5), rng.randrange(1, 3)), rng.randrange(1, 3))
        eps = F(rng.randrange(1, 30), 30)
        win = RationalWindow(2, 2)
        assert reports_agree(
            recurrence_set(rot, B, phi, eps, win),
            theorem1_pipeline(rot, B, phi, eps, win, 1),
        )
    coords = [(), (1,), (0, 1), (1, 1)]
    for _ in range(16):
        picks = rng.sample(coords, rng.randrange(1, 3))
        B = {c: {rng.randrange(2)} for c in picks}
        phi = power_map(R2, (1,), rng.randrange(1, 3))
        eps = F(rng.randrange(1, 30), 30)
        assert reports_agree(
            recurrence_set(ber, B, phi, eps, DegreeWindow(2)),
            theorem1_pipeline(ber, B, phi, eps, DegreeWindow(2), 1),
        )


def test_dilation_preserves_return_set_size():
    rng = random.Random(20260830)
    s = regular_system(7)
    F7 = PrimeField(7)
    lin = power_map(F7, 3, 1)
    for _ in range(25):
        B = {x for x in range(7) if rng.random() < 0.5}
        a = rng.randrange(1, 7)
        aB = {(a * x) % 7 for x in B}
        eps = F(rng.randrange(1, 60), 60)
        r1 = recurrence_set(s, B, lin, eps, FullWindow())
        r2 = recurrence_set(s, aB, lin, eps, FullWindow())
        assert len(r1.R.members) == len(r2.R.members)


# ---------------------------------------------------------------------------
# syndeticity and finite products


def test_syndeticity_conventions():
    s = regular_system(5)
    full = recurrence_set(s, {0, 1}, SQUARE_5, F(1, 100), FullWindow())
    assert syndeticity_check(full) == SyndeticityReport("exact", 0)
    single = recurrence_set(s, {0}, SQUARE_5, F(1, 50), FullWindow())
    assert syndeticity_check(single) == SyndeticityReport("exact", 4)
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    rep = recurrence_set(b, {(): {0}}, IDENT_P2, F(1, 10), DegreeWindow(3))
    assert syndeticity_check(rep) == SyndeticityReport("window-limited", 1)
    # a punched window: R = {0, 1, 1+t} misses t, successor step 2
    tight = recurrence_set(
        b, {(): {0}, (0, 1): {1}}, IDENT_P2, F(1, 100), DegreeWindow(2)
    )
    assert syndeticity_check(tight) == SyndeticityReport("window-limited", 2)
    # degenerate: a single member reports the whole window length
    lone = recurrence_set(b, {(): {0}, (1,): {1}}, IDENT_P2, F(1, 100), DegreeWindow(1))
    assert lone.R.members == frozenset({()})
    assert syndeticity_check(lone) == SyndeticityReport("window-limited", 2)


def test_fp_probe_examples():
    s = regular_system(5)
    full = recurrence_set(s, {0, 1}, SQUARE_5, F(1, 100), FullWindow())
    probe = fp_probe(full, (2, 3))
    assert probe.products == (2, 3, 1)
    assert probe.intersects and probe.witnesses == (2, 3, 1)
    single = recurrence_set(s, {0}, SQUARE_5, F(1, 50), FullWindow())
    probe2 = fp_probe(single, (2, 2))
    assert probe2.products == (2, 2, 4) and not probe2.intersects
    with pytest.raises(RecurrenceError, match="zero generator"):
        fp_probe(full, (0, 2))


def test_fp_probe_needs_ring():
    pts = [(a, b) for a in range(2) for b in range(2)]
    wts = {x: F(1, 4) for x in pts}
    g1 = {(a, b): ((a + 1) % 2, b) for a, b in pts}
    g2 = {(a, b): (a, (b + 1) % 2) for a, b in pts}
    s = FinitePermSystem(2, pts, wts, [g1, g2])
    F2 = PrimeField(2)
    vec = VectorSpace(F2, 2)
    phi = PolynomialMap(
        F2,
        2,
        vec,
        ((Monomial(F2, 1, (1, 0)), (1, 0)), (Monomial(F2, 1, (0, 1)), (0, 1))),
    )
    rep = recurrence_set(s, {(0, 0)}, phi, F(1, 2), FullWindow())
    with pytest.raises(RecurrenceError, match="ring"):
        fp_probe(rep, ((1, 0),))


# ---------------------------------------------------------------------------
# constructive searches


def test_isometric_search_rotation_seventh():
    rot = RotationSystem(F(1, 7))
    m = Monomial(Q, F(1), (2,))
    res = isometric_recurrence_search(rot, F(0), m, F(1, 100), (1,) * 7)
    assert res.found
    assert res.gamma == frozenset(range(1, 8))
    assert res.u_gamma == 7 and res.exponents == (F(49),)
    assert res.distance_sq == 0
    assert res.cells == (200,)
    assert res.proof_bound == "hj(4, 200)"
    assert res.sufficient_length == 7


def test_isometric_search_rotation_third():
    rot = RotationSystem(F(1, 3))
    m = Monomial(Q, F(1), (1,))
    res = isometric_recurrence_search(rot, F(1, 5), m, F(1, 10), (1, 1, 1))
    assert res.found and res.gamma == frozenset({1, 2, 3})
    assert res.u_gamma == 3 and res.distance_sq == 0


def test_isometric_search_perm_trivial_and_exact():
    s = regular_system(5)
    m = Monomial(F5, 1, (1,))
    loose = isometric_recurrence_search(s, frozenset({0, 1}), m, F(2), (1,))
    assert loose.found and loose.gamma == frozenset({1})
    assert loose.cells == (1,)  # one giant ball
    assert loose.distance_sq == F(2, 5)
    tight = isometric_recurrence_search(s, frozenset({0, 1}), m, F(1, 10), (1,) * 5)
    assert tight.found and tight.exponents == (0,)
    assert tight.distance_sq == 0 and tight.sufficient_length == 5


def test_isometric_search_absent_when_r_too_small():
    rot = RotationSystem(F(1, 7))
    m = Monomial(Q, F(1), (2,))
    res = isometric_recurrence_search(rot, F(0), m, F(1, 100), (1,))
    assert res.status == "absent" and res.gamma is None
    assert res.words_scanned == 4
    s = regular_system(5)
    res2 = isometric_recurrence_search(s, frozenset({0, 1}), Monomial(F5, 1, (1,)), F(1, 10), (1,))
    assert res2.status == "absent"


def test_isometric_search_random_integer_gens():
    rot = RotationSystem(F(1, 7))
    m = Monomial(Q, F(1), (2,))
    rng = random.Random(20260831)
    for _ in range(8):
        gens = tuple(rng.randrange(-20, 21) for _ in range(7))
        x = F(rng.randrange(0, 7), 7)
        res = isometric_recurrence_search(rot, x, m, F(1, 100), gens)
        assert res.found
        # re-verify from scratch, independent of the search bookkeeping
        d2 = verify_gamma_distance([rot], x, [m], gens, res.gamma, F(1, 100))
        assert d2 == res.distance_sq


def test_verify_gamma_distance_rejects_bad_claim():
    rot = RotationSystem(F(1, 7))
    m = Monomial(Q, F(1), (2,))
    with pytest.raises(RecurrenceError, match="misses the distance bound"):
        verify_gamma_distance([rot], F(0), [m], (1,) * 7, frozenset({1}), F(1, 100))
    assert verify_gamma_distance([rot], F(0), [m], (1,) * 7, frozenset(range(1, 8)), F(1, 100)) == 0


def test_commuting_search_two_rotations():
    r14, r16 = RotationSystem(F(1, 4)), RotationSystem(F(1, 6))
    m = Monomial(Q, F(1), (1,))
    res = commuting_recurrence_search([r14, r16], [m, m], F(0), F(1, 10), (1,) * 12)
    assert res.found and res.u_gamma == 12
    assert res.gamma == frozenset(range(1, 13))
    assert res.exponents == (F(12), F(12))
    assert res.distance_sq == 0
    assert res.sufficient_length == 12  # lcm of the turn denominators


def test_commuting_search_k1_reduces_to_isometric():
    rot = RotationSystem(F(1, 3))
    m = Monomial(Q, F(1), (1,))
    a = isometric_recurrence_search(rot, F(0), m, F(1, 10), (1, 1, 1))
    b = commuting_recurrence_search([rot], [m], F(0), F(1, 10), (1, 1, 1))
    assert (a.gamma, a.exponents, a.distance_sq) == (b.gamma, b.exponents, b.distance_sq)


def test_commuting_search_mixed_degrees():
    half, third = RotationSystem(F(1, 2)), RotationSystem(F(1, 3))
    m1 = Monomial(Q, F(1), (1,))
    m2 = Monomial(Q, F(1), (2,))
    res = commuting_recurrence_search([half, third], [m1, m2], F(0), F(1, 10), (1,) * 6)
    assert res.found
    u = res.u_gamma
    assert res.exponents == (F(u), F(u * u))
    assert res.distance_sq < F(1, 100)
    assert res.sufficient_length == 6


def test_commuting_search_rejects_non_commuting():
    pts = [0, 1, 2, 3]
    uni = {x: F(1, 4) for x in pts}
    a = FinitePermSystem(2, pts, uni, [{0: 1, 1: 0, 2: 3, 3: 2}])
    b = FinitePermSystem(2, pts, uni, [{0: 0, 1: 2, 2: 1, 3: 3}])
    m = Monomial(PrimeField(2), 1, (1,))
    with pytest.raises(RecurrenceError, match="commute"):
        commuting_recurrence_search([a, b], [m, m], frozenset({0}), F(1, 2), (1,))


def test_search_input_rejections():
    rot = RotationSystem(F(1, 3))
    m = Monomial(Q, F(1), (1,))
    b = BernoulliSystem(2, [F(1, 2), F(1, 2)])
    with pytest.raises(RecurrenceError, match="compact"):
        isometric_recurrence_search(b, F(0), m, F(1, 10), (1,))
    with pytest.raises(RecurrenceError, match="positive"):
        isometric_recurrence_search(rot, F(0), m, F(0), (1,))
    with pytest.raises(RecurrenceError, match="\\[0, 1\\)"):
        isometric_recurrence_search(rot, F(3, 2), m, F(1, 10), (1,))
    with pytest.raises(RecurrenceError, match="at least one"):
        isometric_recurrence_search(rot, F(0), m, F(1, 10), ())
    with pytest.raises(RecurrenceError, match="too large"):
        isometric_recurrence_search(rot, F(0), Monomial(Q, F(1), (3,)), F(1, 10), (1,) * 8)
    with pytest.raises(RecurrenceError, match="one monomial per action"):
        commuting_recurrence_search([rot], [m, m], F(0), F(1, 10), (1,))
