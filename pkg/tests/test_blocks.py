"""Block enumeration and induced-block censuses.

Reference values come from three independent directions: small
catalogues worked out by hand (the square and projective-plane
complexes force a single block; the alternating two-letter relator
forces exactly two), a brute-force search filtered only by the public
validator, and explicitly constructed mapped complexes whose induced
blocks are known.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curv2x.blocks import (
    EdgeBlock,
    VertexBlock,
    block_census,
    canonical_block_key,
    enumerate_vertex_blocks,
    factor_through_origami,
    induced_edge_block,
    induced_vertex_block,
    opposite_edge_block,
    validate_vertex_block,
)
from curv2x.branched_complex import (
    BranchedComplex,
    BranchedMap,
    compose_branched,
    edge_link,
    from_presentation,
    identity_branched_map,
    is_branched_immersion,
    vertex_link,
)
from curv2x.errors import (
    BlockNotEnumerated,
    DomainMismatch,
    EdgeNotAtBaseVertex,
    EnumerationBudgetExceeded,
    IncompatibleOrigami,
    NegativeArea,
    NotPiComplex,
    UnknownEdge,
    UnknownVertex,
    UnsuitablePredicate,
)
from curv2x.origami import Origami, trivial_origami
from curv2x.serre_graph import GraphMorphism, make_graph, ssorted

from gen import (
    brute_force_blocks,
    disjoint_union_map,
    disjoint_union_origami,
    permutation_cover,
    pullback_complex,
)


def pp():
    return from_presentation("a", ["aa"])


def torus():
    return from_presentation("ab", ["abAB"])


def abab():
    return from_presentation("ab", ["abab"])


def a4():
    return from_presentation("a", ["aaaa"])


def genus2():
    return from_presentation("abcd", ["abABcdCD"])


def xy():
    # both letters once: the link is two disjoint arcs, so no predicate
    # accepts it and no block exists over it
    return from_presentation("xy", ["xy"])


def a4_split_block(x, predicate="surface"):
    """Hand-checked block over the 4th-power complex: both fibres split
    into the two even/odd pairs, joined on the open side over the
    positive direction and on the closed side over the negative one."""
    p1, p2 = frozenset({"S0.0", "S0.2"}), frozenset({"S0.1", "S0.3"})
    q1, q2 = frozenset({"s0.0", "s0.2"}), frozenset({"s0.1", "s0.3"})
    return VertexBlock(x, "v0", [p1, p2, q1, q2],
                       [[p1, p2], [q1], [q2]],
                       [[p1], [p2], [q1, q2]], predicate)


def a4_double_realizer():
    """One-face double cover of the 4th-power complex.

    Two vertices, the a-edges alternate, and the single square face
    reads a0 a1 a0 a1; collapsing the two a-edges is an essential
    compatible origami and the induced block is the split one.
    """
    x = a4()
    skel = make_graph(["u0", "u1"], [("a0", "A0", "u0", "u1"),
                                     ("a1", "A1", "u1", "u0")])
    sy = make_graph([f"q{i}" for i in range(4)],
                    [(f"t{i}", f"T{i}", f"q{i}", f"q{(i + 1) % 4}")
                     for i in range(4)])
    attach = GraphMorphism(sy, skel,
                           {"q0": "u0", "q1": "u1", "q2": "u0", "q3": "u1"},
                           {"t0": "a0", "T0": "A0", "t1": "a1", "T1": "A1",
                            "t2": "a0", "T2": "A0", "t3": "a1", "T3": "A1"})
    y = BranchedComplex(skel, sy, attach, {"q0": 1})
    phi = BranchedMap(
        y, x,
        GraphMorphism(skel, x.skeleton, {"u0": "v0", "u1": "v0"},
                      {"a0": "a", "A0": "A", "a1": "a", "A1": "A"}),
        GraphMorphism(sy, x.boundary,
                      {f"q{i}": f"p0.{i}" for i in range(4)},
                      {**{f"t{i}": f"s0.{i}" for i in range(4)},
                       **{f"T{i}": f"S0.{i}" for i in range(4)}}))
    return x, y, phi, Origami(skel, [["a0", "a1"]])


def abab_realizer():
    """Two-vertex complex over the alternating relator: the skeleton is
    a 2-cycle and the single square face reads c d c d; both links are
    2-circles, and the census picks up each catalogue block once."""
    x = abab()
    skel = make_graph(["u0", "u1"], [("c", "C", "u0", "u1"),
                                     ("d", "D", "u1", "u0")])
    sy = make_graph([f"q{i}" for i in range(4)],
                    [(f"t{i}", f"T{i}", f"q{i}", f"q{(i + 1) % 4}")
                     for i in range(4)])
    attach = GraphMorphism(sy, skel,
                           {"q0": "u0", "q1": "u1", "q2": "u0", "q3": "u1"},
                           {"t0": "c", "T0": "C", "t1": "d", "T1": "D",
                            "t2": "c", "T2": "C", "t3": "d", "T3": "D"})
    y = BranchedComplex(skel, sy, attach, {"q0": 1})
    phi = BranchedMap(
        y, x,
        GraphMorphism(skel, x.skeleton, {"u0": "v0", "u1": "v0"},
                      {"c": "a", "C": "A", "d": "b", "D": "B"}),
        GraphMorphism(sy, x.boundary,
                      {f"q{i}": f"p0.{i}" for i in range(4)},
                      {**{f"t{i}": f"s0.{i}" for i in range(4)},
                       **{f"T{i}": f"S0.{i}" for i in range(4)}}))
    return x, y, phi


def torus_double_cover():
    x = torus()
    cover, f = permutation_cover(x.skeleton, {"A": [1, 0], "B": [0, 1]})
    xhat, phi = pullback_complex(x, f)
    return x, xhat, phi


def full_fibre_block(cat):
    return next(b for b in cat
                if len(b.parts) == 2 and len(b.corner_edges) == 8)


def block_area(b):
    x = b.complex
    total = Fraction(0)
    for s in b.corner_edges:
        f = x.face_of_edge(s)
        total += x.area(f) / x.face_length(f)
    return total


def block_chi(b):
    return (Fraction(len(b.upper_link().components()))
            - Fraction(len(b.parts), 2))


def assert_census_identities(phi, counts, catalog):
    lookup = {canonical_block_key(b): b for b in catalog}
    area = sum((counts[k] * block_area(lookup[k]) for k in counts), Fraction(0))
    chi = sum((counts[k] * block_chi(lookup[k]) for k in counts), Fraction(0))
    sk = phi.domain.skeleton
    assert area == phi.domain.total_area()
    assert chi == len(sk.vertices) - len(sk.geometric_edges())


# -- Hand-frozen catalogues -------------------------------------------------

def test_pp_catalog():
    cat = enumerate_vertex_blocks(pp(), "surface")
    assert len(cat) == 1
    b = cat[0]
    assert b.parts == frozenset({frozenset({"S0.0", "S0.1"}),
                                 frozenset({"s0.0", "s0.1"})})
    # one part per fibre leaves no relation choice: both discrete
    assert all(len(c) == 1 for c in b.open_rel)
    assert all(len(c) == 1 for c in b.closed_rel)
    assert validate_vertex_block(b)["valid"]


def test_torus_catalog():
    x = torus()
    cat = enumerate_vertex_blocks(x, "surface")
    assert len(cat) == 1
    b = cat[0]
    assert b.parts == frozenset({
        frozenset({"s0.3", "S0.3"}), frozenset({"s0.0", "S0.0"}),
        frozenset({"s0.1", "S0.1"}), frozenset({"s0.2", "S0.2"})})
    assert all(len(c) == 1 for c in b.open_rel)
    assert all(len(c) == 1 for c in b.closed_rel)
    # the upper link is the whole base link: a 4-circle
    assert b.lower_link() == vertex_link(x, "v0")
    up = b.upper_link()
    assert up.is_connected() and all(up.valence(p) == 2 for p in up.vertices)
    assert b.edge_space().is_forest()
    assert len(set(b.edge_space().component_sets().values())) == 4


def test_abab_catalog():
    cat = enumerate_vertex_blocks(abab(), "surface")
    assert len(cat) == 2
    part_sets = [b.parts for b in cat]
    assert frozenset({frozenset({"S0.0", "S0.2"}),
                      frozenset({"s0.1", "s0.3"})}) in part_sets
    assert frozenset({frozenset({"S0.1", "S0.3"}),
                      frozenset({"s0.0", "s0.2"})}) in part_sets


def test_genus2_catalog():
    cat = enumerate_vertex_blocks(genus2(), "surface")
    assert len(cat) == 1
    assert len(cat[0].parts) == 8
    assert all(len(p) == 2 for p in cat[0].parts)


def test_empty_catalogs():
    assert enumerate_vertex_blocks(xy(), "surface") == []
    assert enumerate_vertex_blocks(xy(), "irreducible") == []


def test_irreducible_equals_surface_on_doubled_letters():
    # fibres of size two cap every upper-link valence at two, so the
    # irreducible condition buys nothing on these complexes
    for make in (pp, torus, abab, genus2):
        x = make()
        surf = [canonical_block_key(b)
                for b in enumerate_vertex_blocks(x, "surface")]
        irr = [canonical_block_key(b)
               for b in enumerate_vertex_blocks(x, "irreducible")]
        assert surf == irr


def test_a4_catalog_sizes():
    x = a4()
    surf = enumerate_vertex_blocks(x, "surface")
    irr = enumerate_vertex_blocks(x, "irreducible")
    # 6 blocks supported on a two-corner pair plus 12 with full support
    assert len(surf) == 18
    assert len(irr) == 29
    surf_keys = {canonical_block_key(b) for b in surf}
    assert surf_keys <= {canonical_block_key(b) for b in irr}


def test_a4_two_edge_blocks_present():
    x = a4()
    keys = {canonical_block_key(b)
            for b in enumerate_vertex_blocks(x, "surface")}
    for i in range(4):
        for j in range(i + 1, 4):
            parts = [frozenset({f"s0.{i}", f"s0.{j}"}),
                     frozenset({f"S0.{(i - 1) % 4}", f"S0.{(j - 1) % 4}"})]
            b = VertexBlock(x, "v0", parts,
                            [[p] for p in parts], [[p] for p in parts],
                            "surface")
            assert validate_vertex_block(b)["valid"]
            assert canonical_block_key(b) in keys


def test_a4_split_block_valid_and_enumerated():
    x = a4()
    b = a4_split_block(x)
    assert validate_vertex_block(b)["valid"]
    keys = {canonical_block_key(c)
            for c in enumerate_vertex_blocks(x, "surface")}
    assert canonical_block_key(b) in keys


def test_a4_joined_variant_is_rejected():
    # joining the open relation over one direction and keeping the
    # closed one discrete everywhere doubles an edge of the vertex
    # space: not a tree
    x = a4()
    p1, p2 = frozenset({"S0.0", "S0.2"}), frozenset({"S0.1", "S0.3"})
    q1, q2 = frozenset({"s0.0", "s0.2"}), frozenset({"s0.1", "s0.3"})
    b = VertexBlock(x, "v0", [p1, p2, q1, q2],
                    [[p1, p2], [q1, q2]],
                    [[p1], [p2], [q1], [q2]], "surface")
    report = validate_vertex_block(b)
    assert not report["vertex_tree"]
    assert not report["valid"]


def test_full_fibre_block_is_irreducible_only():
    x = a4()
    parts = [frozenset({f"s0.{i}" for i in range(4)}),
             frozenset({f"S0.{i}" for i in range(4)})]
    rels = [[p] for p in parts]
    b = VertexBlock(x, "v0", parts, rels, rels, "irreducible")
    assert validate_vertex_block(b)["valid"]
    b_surface = VertexBlock(x, "v0", parts, rels, rels, "surface")
    report = validate_vertex_block(b_surface)
    assert not report["components_admissible"]
    assert not report["valid"]


# -- Reference search -------------------------------------------------------

def test_brute_force_agrees():
    for make in (pp, torus, abab, xy):
        x = make()
        brute = brute_force_blocks(x, "surface")
        keys = [canonical_block_key(b)
                for b in enumerate_vertex_blocks(x, "surface")]
        assert sorted(brute) == keys


def test_enumeration_sorted_deduplicated_and_valid():
    for make, pred in [(torus, "surface"), (a4, "surface"),
                       (a4, "irreducible"), (abab, "surface")]:
        x = make()
        cat = enumerate_vertex_blocks(x, pred)
        keys = [canonical_block_key(b) for b in cat]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        for b in cat:
            assert validate_vertex_block(b)["valid"]
            # a tree alternating open and closed classes fixes the count
            comps = len(b.upper_link().components())
            assert len(b.closed_rel) == len(b.parts) - comps + 1


def test_enumeration_insensitive_to_budget_when_complete():
    x = torus()
    small = enumerate_vertex_blocks(x, "surface", max_candidates=10 ** 4)
    big = enumerate_vertex_blocks(x, "surface", max_candidates=10 ** 7)
    assert [canonical_block_key(b) for b in small] == \
        [canonical_block_key(b) for b in big]


def test_budget_exceeded():
    with pytest.raises(EnumerationBudgetExceeded) as info:
        enumerate_vertex_blocks(a4(), "surface", max_candidates=50)
    assert info.value.vertex == "v0"
    assert info.value.budget == 50


def test_enumerate_rejects_invalid_complex():
    x = pp()
    broken = BranchedComplex(x.skeleton, x.boundary, x.attach, {"p0.0": -1})
    with pytest.raises(NegativeArea):
        enumerate_vertex_blocks(broken, "surface")


def test_custom_predicate_extends_surface_catalog():
    x = abab()

    def connected_with_edge(g):
        return bool(g.edges) and g.is_connected()

    cat = enumerate_vertex_blocks(x, connected_with_edge)
    keys = {canonical_block_key(b) for b in cat}
    surf = {canonical_block_key(b)
            for b in enumerate_vertex_blocks(x, "surface")}
    assert surf < keys


# -- Block data and constructor checks --------------------------------------

def test_block_equality_ignores_presentation_and_predicate():
    x = a4()
    b1 = a4_split_block(x, "surface")
    p1, p2 = frozenset({"S0.0", "S0.2"}), frozenset({"S0.1", "S0.3"})
    q1, q2 = frozenset({"s0.0", "s0.2"}), frozenset({"s0.1", "s0.3"})
    b2 = VertexBlock(x, "v0", [q2, q1, p2, p1],
                     [[q2], [p2, p1], [q1]],
                     [[q1, q2], [p2], [p1]], "irreducible")
    assert b1 == b2
    assert canonical_block_key(b1) == canonical_block_key(b2)


def test_vertex_block_constructor_errors():
    x = a4()
    ok = [frozenset({"s0.0", "s0.2"}), frozenset({"s0.1", "s0.3"}),
          frozenset({"S0.0", "S0.2"}), frozenset({"S0.1", "S0.3"})]
    rels = [[p] for p in ok]
    with pytest.raises(UnknownVertex):
        VertexBlock(x, "nope", ok, rels, rels, "surface")
    with pytest.raises(UnknownEdge):
        VertexBlock(x, "v0", [frozenset({"zz"})], [[frozenset({"zz"})]],
                    [[frozenset({"zz"})]], "surface")
    with pytest.raises(ValueError):  # corners over two different directions
        VertexBlock(x, "v0", [frozenset({"s0.0", "S0.0"})],
                    [[frozenset({"s0.0", "S0.0"})]],
                    [[frozenset({"s0.0", "S0.0"})]], "surface")
    with pytest.raises(ValueError):  # overlap
        bad = [frozenset({"s0.0", "s0.2"}), frozenset({"s0.0", "s0.1"})]
        VertexBlock(x, "v0", bad, [[p] for p in bad], [[p] for p in bad],
                    "surface")
    with pytest.raises(ValueError):  # not closed under reversal
        VertexBlock(x, "v0", [frozenset({"s0.0", "s0.2"})],
                    [[frozenset({"s0.0", "s0.2"})]],
                    [[frozenset({"s0.0", "s0.2"})]], "surface")
    with pytest.raises(ValueError):  # relation missing a part
        VertexBlock(x, "v0", ok, rels[:3], rels, "surface")
    with pytest.raises(ValueError):  # relation with a foreign part
        VertexBlock(x, "v0", ok[:2] + ok[2:], rels,
                    rels[:3] + [[frozenset({"s0.0"})]], "surface")


def test_projection_and_spaces_structure():
    x = a4()
    b = a4_split_block(x)
    proj = b.projection()
    assert proj.is_immersion()  # corners map by identity
    assert set(proj.vmap.values()) == {"a", "A"}
    up = b.upper_link()
    assert len(up.vertices) == 4
    assert up.is_core()
    assert b.lower_link() == vertex_link(x, "v0")
    assert len(set(b.edge_space().component_sets().values())) == 2
    assert b.vertex_space().is_forest()


# -- Edge shadows -----------------------------------------------------------

def test_edge_shadow_roundtrips():
    for make, pred in [(torus, "surface"), (abab, "surface"),
                       (a4, "surface")]:
        x = make()
        for b in enumerate_vertex_blocks(x, pred):
            for e in x.skeleton.link(b.base_vertex):
                g = induced_edge_block(b, e)
                assert g.support <= set(edge_link(x, e))
                assert len(g.partition) == len(b.parts_at(e))
                opp = opposite_edge_block(g)
                assert opp.base_edge == x.skeleton.inv[e]
                assert opposite_edge_block(opp) == g


def test_a4_split_block_shadows_match():
    x = a4()
    b = a4_split_block(x)
    ga = induced_edge_block(b, "a")
    gA = induced_edge_block(b, "A")
    assert ga.support == frozenset({"s0.0", "s0.1", "s0.2", "s0.3"})
    assert opposite_edge_block(ga) == gA
    # the open join over the positive direction reappears as the closed
    # join of the transported shadow
    assert any(len(c) == 2 for c in ga.open_rel)
    assert all(len(c) == 1 for c in ga.closed_rel)
    assert all(len(c) == 1 for c in gA.open_rel)
    assert any(len(c) == 2 for c in gA.closed_rel)


def test_abab_shadows_match_across_blocks():
    x = abab()
    cat = enumerate_vertex_blocks(x, "surface")
    ba = next(b for b in cat if b.parts_at("a"))
    bA = next(b for b in cat if b.parts_at("A"))
    assert ba is not bA
    assert opposite_edge_block(induced_edge_block(ba, "a")) == \
        induced_edge_block(bA, "A")
    assert opposite_edge_block(induced_edge_block(bA, "b")) == \
        induced_edge_block(ba, "B")
    empty = induced_edge_block(ba, "A")
    assert empty.partition == frozenset()
    assert empty.support == frozenset()


def test_edge_shadow_errors():
    _, y, _ = abab_realizer()
    parts = [frozenset({s}) for s in ("t0", "t2", "T1", "T3")]
    rels = [[p] for p in parts]
    b = VertexBlock(y, "u0", parts, rels, rels, "surface")
    with pytest.raises(EdgeNotAtBaseVertex):
        induced_edge_block(b, "d")
    with pytest.raises(UnknownEdge):
        induced_edge_block(b, "zz")


# -- Factorisation through an origami quotient ------------------------------

def test_factorisation_of_the_double_realizer():
    x, y, phi, om = a4_double_realizer()
    fact = factor_through_origami(phi, om)
    assert fact.quotient.skeleton.vertices == ("u0",)
    assert len(fact.quotient.skeleton.geometric_edges()) == 1
    assert fact.quotient.total_area() == 1
    assert is_branched_immersion(fact.from_quotient)
    assert compose_branched(fact.from_quotient, fact.to_quotient) == phi


def test_factorisation_with_trivial_origami_changes_nothing():
    x, y, phi, _ = a4_double_realizer()
    fact = factor_through_origami(phi, trivial_origami(y.skeleton))
    assert fact.quotient == y
    assert fact.to_quotient.skeleton_map.vmap == \
        {v: v for v in y.skeleton.vertices}
    assert fact.from_quotient == phi


def test_factorisation_errors():
    x, y, phi, om = a4_double_realizer()
    with pytest.raises(DomainMismatch):
        factor_through_origami(phi, trivial_origami(x.skeleton))
    with pytest.raises(IncompatibleOrigami):  # not even an origami
        factor_through_origami(identity_branched_map(x),
                               Origami(x.skeleton, [["a", "A"]]))
    with pytest.raises(IncompatibleOrigami):  # origami but not essential
        z = xy()
        factor_through_origami(identity_branched_map(z),
                               Origami(z.skeleton, [["x", "y"]]))
    # essential but incompatible: collapsing the two a-edges of the
    # torus double cover leaves two b-loops at one vertex with the same
    # image, so the factored map is not an immersion
    _, xhat, psi = torus_double_cover()
    bad = Origami(xhat.skeleton, [[("a", 0), ("a", 1)]])
    assert bad.is_essential()
    with pytest.raises(IncompatibleOrigami):
        factor_through_origami(psi, bad)


# -- Censuses ---------------------------------------------------------------

def test_identity_census_single_block_bases():
    for make, pred in [(pp, "surface"), (torus, "surface"),
                       (genus2, "surface")]:
        x = make()
        cat = enumerate_vertex_blocks(x, pred)
        phi = identity_branched_map(x)
        counts = block_census(phi, trivial_origami(x.skeleton), pred,
                              classes=cat)
        assert counts == {canonical_block_key(cat[0]): 1}
        assert_census_identities(phi, counts, cat)


def test_identity_census_a4_irreducible():
    x = a4()
    cat = enumerate_vertex_blocks(x, "irreducible")
    phi = identity_branched_map(x)
    counts = block_census(phi, trivial_origami(x.skeleton), "irreducible",
                          classes=cat)
    full = full_fibre_block(cat)
    assert counts == {canonical_block_key(full): 1}
    assert_census_identities(phi, counts, cat)


def test_census_of_the_double_realizer():
    x, y, phi, om = a4_double_realizer()
    cat = enumerate_vertex_blocks(x, "surface")
    counts = block_census(phi, om, "surface", classes=cat)
    assert counts == {canonical_block_key(a4_split_block(x)): 1}
    assert_census_identities(phi, counts, cat)


def test_census_of_the_abab_realizer():
    x, y, phi = abab_realizer()
    cat = enumerate_vertex_blocks(x, "surface")
    counts = block_census(phi, trivial_origami(y.skeleton), "surface",
                          classes=cat)
    assert counts == {canonical_block_key(b): 1 for b in cat}
    assert_census_identities(phi, counts, cat)


def test_census_of_the_torus_double_cover():
    x, xhat, phi = torus_double_cover()
    cat = enumerate_vertex_blocks(x, "surface")
    counts = block_census(phi, trivial_origami(xhat.skeleton), "surface",
                          classes=cat)
    assert counts == {canonical_block_key(cat[0]): 2}
    assert_census_identities(phi, counts, cat)


def test_census_additive_over_disjoint_unions():
    x, y, phi, om = a4_double_realizer()
    both = disjoint_union_map(phi, phi)
    bom = disjoint_union_origami(om, om, both.domain.skeleton)
    single = block_census(phi, om, "surface")
    assert block_census(both, bom, "surface") == \
        {k: 2 * v for k, v in single.items()}

    mixed = disjoint_union_map(phi, identity_branched_map(x))
    mom = disjoint_union_origami(om, trivial_origami(x.skeleton),
                                 mixed.domain.skeleton)
    cat = enumerate_vertex_blocks(x, "irreducible")
    counts = block_census(mixed, mom, "irreducible", classes=cat)
    full = full_fibre_block(cat)
    assert counts == {canonical_block_key(a4_split_block(x)): 1,
                      canonical_block_key(full): 1}
    assert_census_identities(mixed, counts, cat)


def test_census_on_a_two_vertex_base():
    _, y, _ = abab_realizer()
    cat = enumerate_vertex_blocks(y, "surface")
    assert len(cat) == 2
    assert {b.base_vertex for b in cat} == {"u0", "u1"}
    counts = block_census(identity_branched_map(y),
                          trivial_origami(y.skeleton), "surface",
                          classes=cat)
    assert counts == {canonical_block_key(b): 1 for b in cat}


def test_census_errors():
    x, y, phi, om = a4_double_realizer()
    with pytest.raises(BlockNotEnumerated):
        block_census(phi, om, "surface", classes=[])
    with pytest.raises(NotPiComplex):  # the base link is not a circle
        block_census(identity_branched_map(x), trivial_origami(x.skeleton),
                     "surface")
    with pytest.raises(NotPiComplex):
        z = abab()
        block_census(identity_branched_map(z), trivial_origami(z.skeleton),
                     "surface")
    with pytest.raises(UnsuitablePredicate):
        z = xy()
        block_census(identity_branched_map(z), trivial_origami(z.skeleton),
                     lambda g: True)


def test_induced_block_unknown_vertex():
    x, y, phi, om = a4_double_realizer()
    fact = factor_through_origami(phi, om)
    with pytest.raises(UnknownVertex):
        induced_vertex_block(fact, "nope", "surface")


@settings(deadline=None, max_examples=20)
@given(st.data())
def test_cover_censuses_land_in_the_catalog(data):
    base = data.draw(st.sampled_from(["pp", "torus"]))
    x = {"pp": pp, "torus": torus}[base]()
    n = data.draw(st.integers(1, 3))
    perms = {e: list(data.draw(st.permutations(range(n))))
             for e in x.skeleton.geometric_edges()}
    _, f = permutation_cover(x.skeleton, perms)
    xhat, phi = pullback_complex(x, f)
    cat = enumerate_vertex_blocks(x, "surface")
    counts = block_census(phi, trivial_origami(xhat.skeleton), "surface",
                          classes=cat)
    assert counts == {canonical_block_key(cat[0]): n}
    assert_census_identities(phi, counts, cat)
