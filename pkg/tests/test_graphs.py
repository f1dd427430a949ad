import itertools
import json
import random

import pytest

from linkforge import graphs
from linkforge.graphs import (ConstructionSequence, MechanismGraph,
                              apply_filters, are_isomorphic, build_catalog,
                              canonical_form, count_combinations,
                              enumerate_sequences)

# Expected per-stage counts, frozen from hand enumeration cross-checked
# against the retained-graph table (k = 0..5).
ALL_ROW = [1, 3, 18, 180, 2700, 56700]
STAGE1_ROW = [0, 1, 5, 31, 257, 2803]
STAGE2_ROW = [0, 0, 1, 11, 107, 1227]
STAGE3_ROW = [0, 0, 1, 8, 68, 632]
FINAL_ROW = [0, 0, 1, 7, 47, 341]


def test_count_combinations_values():
    for k, expected in enumerate(ALL_ROW):
        assert count_combinations(k) == expected
    assert count_combinations(0) == 1  # empty product


def test_count_combinations_guard():
    with pytest.raises(ValueError):
        count_combinations(9)
    with pytest.raises(ValueError):
        count_combinations(-1)


@pytest.mark.parametrize("k", range(5))
def test_enumerate_matches_count(k):
    assert len(enumerate_sequences(k)) == count_combinations(k)


def test_enumerate_lexicographic_and_deterministic():
    seqs = enumerate_sequences(2)
    layer_lists = [s.layers for s in seqs]
    assert layer_lists == sorted(layer_lists)
    assert layer_lists == [s.layers for s in enumerate_sequences(2)]
    assert enumerate_sequences(0) == [ConstructionSequence("revolute", ())]


def test_t2_filter_survivor_is_the_fourbar_coupler():
    survivors = apply_filters(enumerate_sequences(2))
    assert len(survivors) == 1
    g = survivors[0]
    # node 3 pinned to (second ground, crank tip); node 4 is the coupler point
    assert g.layers == ((1, 2), (2, 3))
    assert g.drawing_node == 4
    assert len(g.links) == 2 + 2 * g.k


def test_t2_rejections():
    # both parents grounded: a static point
    static = ConstructionSequence("revolute", ((0, 1), (2, 3)))
    assert not graphs.passes_filters(static)
    # drawing node pinned to a ground pivot: traces a circular arc
    arc = ConstructionSequence("revolute", ((1, 2), (1, 3)))
    assert not graphs.passes_filters(arc)


def test_filter_order_independence():
    seqs = enumerate_sequences(3)
    base = {s.layers for s in seqs if graphs.passes_filters(s)}
    rnd = random.Random(0)
    for _ in range(5):
        preds = list(graphs.FILTER_PREDICATES)
        rnd.shuffle(preds)
        assert {s.layers for s in seqs
                if graphs.passes_filters(s, tuple(preds))} == base


def test_stage_counts_conjunction_equals_filters():
    seqs = enumerate_sequences(3)
    stages = graphs.stage_counts(seqs)
    assert stages["no_redundant_triangles"] == \
        sum(1 for s in seqs if graphs.passes_filters(s))


@pytest.mark.parametrize("k", range(4))
def test_stage_counts_against_frozen_rows(k):
    seqs = enumerate_sequences(k)
    stages = graphs.stage_counts(seqs)
    assert stages["all"] == ALL_ROW[k]
    assert stages["one_drawing_node"] == STAGE1_ROW[k]
    assert stages["two_fixed_nodes"] == STAGE2_ROW[k]
    assert stages["no_redundant_triangles"] == STAGE3_ROW[k]


def test_canonical_relabeling_invariance():
    # swapping the construction order of the two independent dyads relabels
    # the added nodes; the canonical code must not change
    g1 = MechanismGraph("revolute", ((1, 2), (0, 2), (3, 4)))
    g2 = MechanismGraph("revolute", ((0, 2), (1, 2), (3, 4)))
    assert canonical_form(g1) == canonical_form(g2)
    assert are_isomorphic(g1, g2)


def test_canonical_ground_swap_branch():
    # an independent minimization over the same permutation group, applied
    # to the ground-swapped link set, must land on the same code
    g = MechanismGraph("revolute", ((1, 2), (2, 3)))
    swap = {0: 1, 1: 0, 2: 2, 3: 3, 4: 4}
    swapped = sorted(tuple(sorted((swap[a], swap[b])))
                     for a, b in g.structural_links)
    best = None
    for flip in (False, True):
        base = {0: 1, 1: 0, 2: 2} if flip else {0: 0, 1: 1, 2: 2}
        for perm in itertools.permutations((3, 4)):
            m = dict(base)
            m.update(zip((3, 4), perm))
            relabeled = sorted(tuple(sorted((m[a], m[b]))) for a, b in swapped)
            code = "%s|k=%d|%s" % (g.seed_kind, g.k,
                                   ",".join("%d-%d" % l for l in relabeled))
            best = code if best is None or code < best else best
    assert best == canonical_form(g)


def test_canonical_distinguishes_sizes():
    g2 = MechanismGraph("revolute", ((1, 2), (2, 3)))
    g3 = MechanismGraph("revolute", ((1, 2), (2, 3), (3, 4)))
    assert canonical_form(g2) != canonical_form(g3)


def test_dedup_partition_matches_bruteforce_isomorphism():
    survivors = apply_filters(enumerate_sequences(3))
    by_code = {}
    for g in survivors:
        by_code.setdefault(canonical_form(g), []).append(g)
    # pairwise brute-force partition must be identical
    for g1, g2 in itertools.combinations(survivors, 2):
        same_code = canonical_form(g1) == canonical_form(g2)
        assert same_code == are_isomorphic(g1, g2)
    assert len(by_code) == FINAL_ROW[3]


@pytest.mark.parametrize("k_max,expected_total", [(2, 1), (3, 8), (4, 55)])
def test_catalog_totals(k_max, expected_total):
    assert build_catalog(k_max).total == expected_total


def test_catalog_entries_well_formed(catalog3):
    codes = [e.canonical_code for e in catalog3.entries]
    assert len(codes) == len(set(codes))
    for e in catalog3.entries:
        g = e.graph
        assert len(g.links) == 2 + 2 * g.k
        assert isinstance(g.drawing_node, int)
        assert e.id.startswith(f"T{g.k}-")


def test_slider_catalog_mirrors_revolute(slider_catalog2):
    rev = build_catalog(2, "revolute")
    assert slider_catalog2.total == rev.total
    entry = slider_catalog2.by_id("ST2-0")
    assert entry.graph.layers == rev.by_id("T2-0").graph.layers
    # kinematic links differ: rod replaces the ground bar
    assert (1, 2) in entry.graph.links
    assert (0, 1) not in entry.graph.links


def test_catalog_serialization_roundtrip(catalog3):
    text = graphs.catalog_to_jsonl(catalog3)
    again = graphs.catalog_from_jsonl(text)
    assert [e.id for e in again.entries] == [e.id for e in catalog3.entries]
    assert graphs.catalog_to_jsonl(again) == text
    rec = json.loads(text.splitlines()[0])
    assert list(rec.keys()) == ["id", "k", "seed_kind", "parent_pairs",
                                "links", "drawing_node", "canonical_code"]


def test_catalog_deterministic(catalog3):
    again = graphs.build_catalog(3, "revolute")
    assert graphs.catalog_to_jsonl(again) == graphs.catalog_to_jsonl(catalog3)
