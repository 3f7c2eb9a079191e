import pytest
from hypothesis import given, settings, strategies as st

from projkit.errors import PartialActionError, ProjkitError
from projkit.groups import (
    FreeProduct, Permutation, closure, element_order, enumerate_products, group_name,
)

G = FreeProduct((2, 3))
letters = st.lists(st.tuples(st.integers(0, 1), st.integers(-5, 5)), max_size=14)


def stack_reduce(seq, orders):
    # independent reducer: push letters one at a time, merging equal factors
    stack = []
    for f, e in seq:
        e %= orders[f]
        if e == 0:
            continue
        if stack and stack[-1][0] == f:
            e2 = (stack.pop()[1] + e) % orders[f]
            if e2:
                stack.append((f, e2))
        else:
            stack.append((f, e))
    return tuple(stack)


def build(seq):
    g = G.identity
    for f, e in seq:
        g = g * G.letter(f, e)
    return g


@given(letters)
def test_normal_form_matches_stack_oracle(seq):
    assert build(seq).letters == stack_reduce(seq, G.orders)


@given(letters, letters, letters)
def test_associativity_and_inverse(a, b, c):
    x, y, z = build(a), build(b), build(c)
    assert (x * y) * z == x * (y * z)
    assert (x * x.inverse()).is_identity
    assert ~(x * y) == ~y * ~x


@given(letters, st.integers(-6, 6))
@settings(max_examples=50)
def test_pow_matches_repeated_product(seq, n):
    x = build(seq)
    expect = G.identity
    for _ in range(abs(n)):
        expect = expect * (x if n >= 0 else ~x)
    assert x ** n == expect


@given(letters)
def test_label_parse_round_trip(seq):
    g = build(seq)
    assert G.parse(g.label) == g


def test_parse_rejects_garbage():
    for bad in ("x1", "h", "h1?", "1h"):
        with pytest.raises(ValueError):
            G.parse(bad)
    assert G.parse("e").is_identity
    assert G.parse("h1h1").is_identity
    assert G.parse("k2k2") == G.letter(1, 1)


def test_word_counts():
    def count(bound):
        # syllable strings alternate factors; each syllable picks a non-zero exponent
        total = 1
        for n in range(1, bound + 1):
            for first in (0, 1):
                ways = 1
                for i in range(n):
                    ways *= G.orders[(first + i) % 2] - 1
                total += ways
        return total

    assert len(G.words(6)) == count(6) == 50
    assert len(G.words(8)) == count(8) == 106
    ws = G.words(8)
    assert len(set(ws)) == len(ws)
    assert all(w.syllables <= 8 for w in ws)


def test_bad_factor_orders():
    with pytest.raises(ValueError):
        FreeProduct((1, 3))
    with pytest.raises(ValueError):
        FreeProduct((2, 3), ("h",))


def test_mixing_groups_raises():
    with pytest.raises(ProjkitError):
        G.letter(0) * FreeProduct((2, 2)).letter(0)


def test_permutations():
    r = Permutation({0: 0, 1: 3, 2: 2, 3: 1})
    assert (r * r).is_identity
    assert r.act(1) == 3
    assert Permutation.identity().act("anything") == "anything"
    with pytest.raises(PartialActionError):
        r.act(7)
    c = Permutation({i: (i + 1) % 5 for i in range(5)})
    assert element_order(c) == 5
    assert c ** -1 == c.inverse()
    assert (c ** 5).is_identity
    assert group_name(closure([c], Permutation.identity())) == "Z/5"


def test_closure_and_names():
    assert len(closure(G.factor_elements(1), G.identity)) == 3
    assert group_name(closure([G.letter(0)], G.identity)) == "Z/2"
    assert group_name([G.identity]) == "1"
    s = Permutation({0: 1, 1: 0, 2: 2})
    t = Permutation({0: 0, 1: 2, 2: 1})
    assert group_name(closure([s, t], Permutation.identity())) == "group of order 6"


def test_infinite_group_does_not_close():
    elems, closed = enumerate_products(G.generators(), 5)
    assert not closed
    with pytest.raises(ProjkitError):
        closure(G.generators(), G.identity, limit=200)
    _, closed = enumerate_products([G.letter(1)], 3)
    assert closed
