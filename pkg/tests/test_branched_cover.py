import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import load, random_word
from thurston import branched_cover as bc
from thurston import freegroup as fg
from thurston import mapping_class as mc
from thurston import sphere as sp
from thurston.errors import NotLiftable, PresentationError

MAPS = ["basilica.tm", "obstructed.tm", "obstructed_copy.tm", "half.tm", "lattes.tm", "period4.tm",
        "twocycle.tm", "levy2.tm", "levy_greater.tm", "cubic_a.tm", "cubic_b.tm", "cubic_c.tm"]


def fuzzed_maps(rng, count):
    """Valid presentations: data maps post-composed with random pure mapping classes."""
    out = []
    for _ in range(count):
        f = load(rng.choice(MAPS))
        if f.n >= 4:
            gens = mc.standard_generators(f.base)
            h = gens.evaluate([rng.choice(gens.letters()) for _ in range(rng.randint(0, 3))])
            f = bc.post_compose(h, f)
        out.append(f)
    return out


def perm_of_word(c, w):
    # independent: compose the permutations as explicit maps on sheets
    d = c.degree
    cur = list(range(d))
    for a in w:
        p = c.monodromy[abs(a) - 1]
        if a < 0:
            inv = [0] * d
            for i, j in enumerate(p):
                inv[j] = i
            p = inv
        cur = [p[x] for x in cur]
    return cur


def cycle_lengths(p):
    seen, out = set(), []
    for s in range(len(p)):
        if s not in seen:
            k, t = 0, s
            while t not in seen:
                seen.add(t)
                t = p[t]
                k += 1
            out.append(k)
    return sorted(out)


# --- validation ------------------------------------------------------------

def test_z_squared_pattern_is_valid():
    c = load("basilica.tm")
    rep = bc.validate(c)
    assert rep.ok and rep.branching == 2
    assert rep.critical_values == (2, 3)
    assert rep.postcritical == (1, 2, 3)


def test_all_data_maps_validate():
    for name in MAPS:
        c = load(name)
        rep = bc.validate(c)
        assert rep.ok
        assert rep.branching == 2 * c.degree - 2
        assert set(rep.postcritical) <= set(range(1, c.n + 1))


def replace(c, **kw):
    fields = dict(degree=c.degree, base=c.base, monodromy=c.monodromy, restrictions=c.restrictions,
                  point_map=c.point_map, local_degrees=c.local_degrees, cover=c.cover)
    fields.update(kw)
    return bc.CoverPresentation(**fields)


def test_monodromy_product_violation():
    c = load("basilica.tm")
    bad = replace(c, monodromy=((1, 0), (0, 1), (0, 1)))
    with pytest.raises(PresentationError) as e:
        bc.validate(bad)
    assert e.value.invariant == "MonodromyProductViolation"


def test_disconnected_cover():
    c = load("basilica.tm")
    ident = ((0, 1),) * 3
    bad = replace(c, monodromy=ident)
    rep = bc.validate(bad, raise_on_error=False)
    assert not rep.ok
    assert "DisconnectedCover" in [name for name, _ in rep.violations]


def test_point_map_mismatch_named():
    c = load("basilica.tm")
    bad = replace(c, point_map=(2, 3, 1))
    with pytest.raises(PresentationError) as e:
        bc.validate(bad)
    assert e.value.invariant == "PointMapMismatch"


def test_riemann_hurwitz_on_fuzzed_maps():
    rng = random.Random(5)
    for c in fuzzed_maps(rng, 30):
        assert sum(c.degree - len(bc.perm_cycles(p)) for p in c.monodromy) == 2 * c.degree - 2
        assert bc.validate(c).ok


# --- orbifold ---------------------------------------------------------------

def hand_euler(sig):
    return 2 - sum(Fraction(1) if v == 0 else 1 - Fraction(1, v) for v in sig)


def test_lattes_is_2222():
    o = bc.orbifold_type(load("lattes.tm"))
    assert o.kind == "Parabolic2222"
    assert o.signature == (2, 2, 2, 2)
    assert o.euler == 0 == hand_euler(o.signature)


def test_five_points_hyperbolic():
    o = bc.orbifold_type(load("period4.tm"))
    assert o.signature == (0, 0, 0, 0, 0)
    assert o.kind == "Hyperbolic" and o.euler == hand_euler(o.signature) == -3


def test_basilica_hyperbolic():
    o = bc.orbifold_type(load("basilica.tm"))
    assert o.signature == (0, 0, 0)
    assert o.kind == "Hyperbolic" and o.euler == -1


def test_parabolic_other():
    # z^2 marked at 0, infinity and 1: signature (inf, 1, inf), euler 0
    s = sp.PuncturedSphere(3)
    c = bc.build(s, [(1, 0), (0, 1)], [((1,), ()), ((), (2,))])
    o = bc.orbifold_type(c)
    assert sorted(o.signature) == [0, 0, 1]
    assert o.kind == "ParabolicOther" and o.euler == hand_euler(o.signature) == 0


def test_orbifold_euler_matches_hand_formula():
    rng = random.Random(9)
    for c in fuzzed_maps(rng, 20):
        o = bc.orbifold_type(c)
        assert o.euler == hand_euler(o.signature)
        assert (o.kind == "Hyperbolic") == (o.euler < 0)


# --- pullback ---------------------------------------------------------------

def test_pullback_trivial_monodromy_splits():
    c = load("obstructed.tm")
    comps = bc.pullback_curve(c, sp.standard_curve(c.base, 1, 2))
    assert [k.degree for k in comps] == [1, 1]


def test_pullback_full_cycle_one_component():
    c = load("half.tm")
    comps = bc.pullback_curve(c, sp.standard_curve(c.base, 1, 2))
    assert [k.degree for k in comps] == [2]


def test_pullback_degree_conservation_fuzzed():
    rng = random.Random(123)
    maps = fuzzed_maps(rng, 20)
    for _ in range(200):
        c = rng.choice(maps)
        w = fg.reduce(random_word(rng, c.base.rank, rng.randint(1, 8)))
        if not w:
            continue
        comps = bc.pullback_curve(c, w)
        assert sum(k.degree for k in comps) == c.degree
        assert sorted(k.degree for k in comps) == cycle_lengths(perm_of_word(c, w))


def test_pullback_class_functorial():
    rng = random.Random(77)
    maps = fuzzed_maps(rng, 10)
    for _ in range(60):
        c = rng.choice(maps)
        w = fg.reduce(random_word(rng, c.base.rank, rng.randint(1, 6)))
        if not w:
            continue
        u = random_word(rng, c.base.rank, rng.randint(1, 4))
        w2 = fg.reduce(fg.mul(u, w, fg.inverse(u)))
        a = sorted((k.cls.word, k.degree) for k in bc.pullback_curve(c, w))
        b = sorted((k.cls.word, k.degree) for k in bc.pullback_curve(c, w2))
        assert a == b


# --- lifting ----------------------------------------------------------------

def test_identity_lifts():
    for name in MAPS:
        c = load(name)
        res = bc.lifts_through(c, c)
        assert res
        assert any(l.sheet_map == tuple(range(c.degree)) for l in res.lifts)


def test_relabeled_sheets_lift():
    c = load("obstructed.tm")
    g = bc.relabel_sheets(c, (1, 0))
    res = bc.lifts_through(c, g)
    assert res and (1, 0) in [l.sheet_map for l in res.lifts]


def oracle_correspondences(f, g, h):
    out = []
    for pi in itertools.permutations(range(f.degree)):
        ok = True
        for k in range(1, f.base.rank + 1):
            a = f.monodromy[k - 1]
            b = perm_of_word(g, h.auto((k,)))
            if any(pi[a[s]] != b[pi[s]] for s in range(f.degree)):
                ok = False
                break
        if ok:
            out.append(pi)
    return out


def test_lift_correspondences_match_brute_force():
    # half twists move branch values onto non-branch values, which cannot lift
    f = load("obstructed.tm")
    gens = mc.standard_generators(f.base, half_twists=True)
    saw_false = False
    for h in mc.ball(gens, 2).elements:
        want = oracle_correspondences(f, f, h)
        assert sorted(bc.sheet_correspondences(f, f, h)) == sorted(want)
        res = bc.lifts_through(f, f, h)
        if not want:
            assert not res
            saw_false = True
    assert saw_false


def test_lift_satisfies_defining_relation():
    f = load("obstructed.tm")
    gens = mc.standard_generators(f.base)
    for h in mc.ball(gens, 2).elements:
        for lift in bc.lifts_through(f, f, h).lifts:
            # h o f = f o lift as presentations, up to the sheet correspondence
            left = bc.post_compose(h, f)
            right = bc.pre_compose(f, lift.element)
            assert bc.equivalence_witness(left, right, mc.identity(f.base)) is not None


def test_lifts_need_same_degree():
    with pytest.raises(NotLiftable):
        bc.lifts_through(load("obstructed.tm"), load("period4.tm"))


# --- conjugation and composition ------------------------------------------

def test_conjugate_by_identity_and_inverse():
    f = load("obstructed.tm")
    gens = mc.standard_generators(f.base)
    h = gens.evaluate((1, 2, -1))
    assert bc.conjugate(f, mc.identity(f.base)) == f
    back = bc.conjugate(bc.conjugate(f, h), h.inverse())
    assert bc.equivalence_witness(f, back, mc.identity(f.base)) is not None


def test_conjugate_is_equivalent():
    rng = random.Random(4)
    f = load("half.tm")
    gens = mc.standard_generators(f.base)
    for _ in range(5):
        h = gens.evaluate([rng.choice(gens.letters()) for _ in range(3)])
        g = bc.conjugate(f, h)
        assert bc.equivalence_witness(f, g, h) is not None


def test_dynamics_compatible():
    f = load("obstructed.tm")
    assert bc.dynamics_compatible(f, f, (1, 2, 3, 4))
    assert bc.dynamics_compatible(f, f, (2, 1, 4, 3))
    assert not bc.dynamics_compatible(f, f, (3, 2, 1, 4))


def test_compose_degree_and_iterate_dynamics():
    f = load("basilica.tm")
    ff = bc.compose(f, f)
    assert ff.degree == 4
    assert ff.point_map == tuple(f.point_map[f.point_map[i] - 1] for i in range(3))


def test_homeomorphism_class_round_trip():
    s = sp.PuncturedSphere(4)
    gens = mc.standard_generators(s)
    h = gens.evaluate((1, -2))
    ident = bc.build(s, [(0,)] * 3, [((1,),), ((2,),), ((3,),)])
    c = bc.post_compose(h, ident)
    assert mc.mc_equal(bc.homeomorphism_class(c), h) is not None


@given(st.lists(st.integers(-3, 3).filter(bool), min_size=1, max_size=6), st.integers(0, 1000))
def test_restriction_endpoints_follow_monodromy(word, seed):
    c = load("lattes.tm")
    w = fg.reduce(word)
    for s in range(c.degree):
        _, t = c.restrict(w, s)
        assert t == perm_of_word(c, w)[s]
