import itertools

import pytest
from hypothesis import given, strategies as st

from thurston import freegroup as fg
from thurston import sphere as sp
from thurston.errors import NoEssentialCurves, NotEssential


def test_peripheral_examples():
    s = sp.PuncturedSphere(4)
    assert sp.peripheral(s, 1) == fg.conj_class((1,))
    assert sp.peripheral(s, 4) == fg.conj_class(fg.inverse((1, 2, 3)))


@pytest.mark.parametrize("n", range(3, 9))
def test_peripheral_classes_distinct(n):
    s = sp.PuncturedSphere(n)
    classes = [sp.peripheral(s, i) for i in range(1, n + 1)]
    for a, b in itertools.combinations(classes, 2):
        assert a != b


def test_standard_curve_examples():
    s = sp.PuncturedSphere(4)
    assert sp.standard_curve(s, 1, 2).cls == fg.conj_class((1, 2))
    with pytest.raises(NotEssential):
        sp.standard_curve(s, 1, 3)
    s5 = sp.PuncturedSphere(5)
    assert sp.standard_curve(s5, 1, 2) != sp.standard_curve(s5, 3, 4)


def test_classification_examples():
    s = sp.PuncturedSphere(4)
    assert sp.is_trivial_or_peripheral(s, ()) == sp.TRIVIAL
    assert sp.is_trivial_or_peripheral(s, (-2,)) == sp.Kind("peripheral", 2)
    assert sp.is_trivial_or_peripheral(s, (1, 2)) == sp.ESSENTIAL
    # independent check against the four peripheral classes
    cls = fg.conj_class((1, 2))
    assert all(cls != fg.conj_class(s.generator(i)) for i in range(1, 5))


def admissible(n):
    s = sp.PuncturedSphere(n)
    out = []
    for i in range(1, n):
        for j in range(i + 1, n):
            if sp.is_trivial_or_peripheral(s, tuple(range(i, j + 1))) == sp.ESSENTIAL:
                out.append((i, j))
    return out


def test_filling_system_sizes():
    assert len(sp.filling_system(sp.PuncturedSphere(4))) == 2
    assert len(sp.filling_system(sp.PuncturedSphere(5))) == 5
    for n in (4, 5, 6):
        got = {sp.standard_interval(c) for c in sp.filling_system(sp.PuncturedSphere(n))}
        assert got == set(admissible(n))
    with pytest.raises(NoEssentialCurves):
        sp.filling_system(sp.PuncturedSphere(3))


def test_no_pure_class_fixes_the_filling_system_n4():
    from thurston import mapping_class as mc
    s = sp.PuncturedSphere(4)
    gens = mc.standard_generators(s)
    fill = sp.filling_system(s)
    ident = mc.identity(s)
    for length in range(1, 4):
        for word in itertools.product(gens.letters(), repeat=length):
            m = gens.evaluate(word)
            if all(mc.act_on_curve(m, c) == c for c in fill):
                # fixing every filling curve forces the identity class
                assert mc.mc_equal(m, ident) is not None


@pytest.mark.parametrize("n", range(3, 9))
def test_relation_reduces_to_identity(n):
    assert sp.PuncturedSphere(n).relation() == ()


@pytest.mark.parametrize("n", range(4, 9))
def test_standard_curves_essential(n):
    s = sp.PuncturedSphere(n)
    for i, j in sp.standard_pairs(n):
        assert sp.is_trivial_or_peripheral(s, sp.standard_curve(s, i, j).cls) == sp.ESSENTIAL


@given(st.sampled_from(sp.standard_pairs(6)),
       st.lists(st.sampled_from([1, -1, 2, -2, 3, -3, 4, -4, 5, -5]), max_size=12))
def test_standard_curve_class_conjugation_invariant(ij, g):
    s = sp.PuncturedSphere(6)
    c = sp.standard_curve(s, *ij)
    g = tuple(g)
    moved = sp.curve(s, fg.mul(g, c.word, fg.inverse(g)))
    assert moved == c


def test_multicurve_rejects_duplicates():
    s = sp.PuncturedSphere(5)
    c = sp.standard_curve(s, 1, 2)
    with pytest.raises(ValueError):
        sp.Multicurve((c, sp.curve(s, (2, 1))))
