"""Mechanism-graph enumeration, structural filtering and the catalog.

Every mechanism starts from three seed nodes: node 0 (crank ground pivot),
node 1 (second ground pivot, or the slider for slider-seeded graphs) and
node 2 (the crank tip, i.e. the driven node).  Each construction layer adds
one node pinned to two existing parents, so a k-layer graph has 3 + k nodes
and 2 + 2k links.

Filtering works on rigid clusters: maximal node sets that are pairwise at
fixed distance.  Initially the ground pair {0, 1} and the crank pair {0, 2}
are clusters, as is every linked pair; a node whose two parents lie in one
cluster becomes rigid in it and joins; clusters sharing two nodes merge.
Slider-seeded graphs run the same structural rules with node 1 standing in
for the second ground pivot, which makes the two catalogs align one-to-one.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

SEED_KINDS = ("revolute", "slider")

NODE_FIXED_A = 0
NODE_FIXED_B = 1
NODE_INPUT = 2

GROUND_PAIR = (NODE_FIXED_A, NODE_FIXED_B)
CRANK_PAIR = (NODE_FIXED_A, NODE_INPUT)


@dataclass(frozen=True)
class ConstructionSequence:
    """Ordered parent pairs; layer i (0-based) adds node 3 + i."""

    seed_kind: str
    layers: tuple

    @property
    def k(self):
        return len(self.layers)


@dataclass(frozen=True)
class MechanismGraph:
    seed_kind: str
    layers: tuple  # parent pair per added node, in construction order

    @property
    def k(self):
        return len(self.layers)

    @property
    def n_nodes(self):
        return 3 + self.k

    @property
    def drawing_node(self):
        """The unique childless added node (valid on filtered graphs only)."""
        childless = childless_added_nodes(self.layers)
        if len(childless) != 1:
            raise ValueError("graph does not have a unique drawing node")
        return childless[0]

    @property
    def links(self):
        """Kinematic links.  Slider seeds swap the ground bar for the
        connecting rod between crank tip and slider."""
        seed = [CRANK_PAIR, (NODE_FIXED_B, NODE_INPUT)] if self.seed_kind == "slider" \
            else [GROUND_PAIR, CRANK_PAIR]
        for i, (p, q) in enumerate(self.layers):
            seed.append((min(p, 3 + i), max(p, 3 + i)))
            seed.append((min(q, 3 + i), max(q, 3 + i)))
        return sorted(tuple(sorted(l)) for l in seed)

    @property
    def structural_links(self):
        """Seed-independent links used for filtering and isomorphism."""
        out = [GROUND_PAIR, CRANK_PAIR]
        for i, (p, q) in enumerate(self.layers):
            out.append(tuple(sorted((p, 3 + i))))
            out.append(tuple(sorted((q, 3 + i))))
        return sorted(out)


@dataclass
class CatalogEntry:
    id: str
    graph: MechanismGraph
    canonical_code: str


@dataclass
class Catalog:
    seed_kind: str
    k_max: int
    entries: list
    filter_report: dict = field(default_factory=dict)

    @property
    def counts_per_k(self):
        counts = {k: 0 for k in range(self.k_max + 1)}
        for e in self.entries:
            counts[e.graph.k] += 1
        return counts

    @property
    def total(self):
        return len(self.entries)

    def by_id(self, graph_id):
        for e in self.entries:
            if e.id == graph_id:
                return e
        raise KeyError(f"no catalog entry {graph_id!r}")


def count_combinations(k):
    """Number of k-layer construction sequences: prod_{i=3..k+2} C(i, 2)."""
    if k < 0 or k > 8:
        raise ValueError("k must be in 0..8")
    n = 1
    for i in range(3, k + 3):
        n *= math.comb(i, 2)
    return n


def enumerate_sequences(k, seed_kind="revolute"):
    """All k-layer sequences in lexicographic order of their parent pairs."""
    if k < 0 or k > 6:
        raise ValueError("k must be in 0..6")
    if seed_kind not in SEED_KINDS:
        raise ValueError(f"seed_kind must be one of {SEED_KINDS}")
    per_layer = [tuple(itertools.combinations(range(3 + i), 2)) for i in range(k)]
    return [ConstructionSequence(seed_kind, layers)
            for layers in itertools.product(*per_layer)]


def childless_added_nodes(layers):
    parents = set()
    for p, q in layers:
        parents.add(p)
        parents.add(q)
    return [3 + i for i in range(len(layers)) if 3 + i not in parents]


def cluster_history(layers):
    """Rigid clusters before each node addition.

    Returns a list of length k + 1; element i is the list of maximal rigid
    clusters (frozensets) of the structure containing added nodes < i.
    """
    clusters = [frozenset(GROUND_PAIR), frozenset(CRANK_PAIR)]
    history = [list(clusters)]
    for i, (p, q) in enumerate(layers):
        n = 3 + i
        host = _cluster_containing(clusters, p, q)
        if host is not None:
            clusters.remove(host)
            clusters.append(host | {n})
        else:
            clusters.append(frozenset((n, p)))
            clusters.append(frozenset((n, q)))
        clusters = _merge_clusters(clusters)
        history.append(list(clusters))
    return history


def _cluster_containing(clusters, p, q):
    for c in clusters:
        if p in c and q in c:
            return c
    return None


def _merge_clusters(clusters):
    # merge clusters sharing >= 2 nodes (two shared points pin the bodies
    # together), then drop subsets
    merged = list(clusters)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(merged, 2):
            if len(a & b) >= 2:
                merged.remove(a)
                merged.remove(b)
                merged.append(a | b)
                changed = True
                break
    return [c for c in merged
            if not any(c < other for other in merged)]


# --- filter predicates -------------------------------------------------
#
# The retained set is the conjunction of the four predicates below; they are
# pure functions of the sequence, so evaluation order never matters.

def has_unique_drawing_node(seq):
    """Exactly one childless added node: a single output point."""
    return len(childless_added_nodes(seq.layers)) == 1


def no_static_added_nodes(seq):
    """No added node rigid in the ground body: exactly two grounded points."""
    history = cluster_history(seq.layers)
    for i, (p, q) in enumerate(seq.layers):
        host = _cluster_containing(history[i], p, q)
        if host is not None and NODE_FIXED_A in host and NODE_FIXED_B in host:
            return False
    return True


def drawing_node_off_ground(seq):
    """No childless node linked to a ground pivot: its curve would be a
    circular arc, which a shorter construction already produces."""
    for n in childless_added_nodes(seq.layers):
        p, q = seq.layers[n - 3]
        if p in GROUND_PAIR or q in GROUND_PAIR:
            return False
    return True


def no_triangles_on_rigid_bodies(seq):
    """A node may pin onto a bare two-node bar (that is how rigid plates and
    coupler points form) but not onto a body that is already a rigid
    assembly of three or more nodes: such a triangle adds no variety."""
    history = cluster_history(seq.layers)
    for i, (p, q) in enumerate(seq.layers):
        host = _cluster_containing(history[i], p, q)
        if host is not None and len(host) >= 3:
            return False
    return True


FILTER_PREDICATES = (
    has_unique_drawing_node,
    no_static_added_nodes,
    drawing_node_off_ground,
    no_triangles_on_rigid_bodies,
)


def passes_filters(seq, predicates=FILTER_PREDICATES):
    return all(pred(seq) for pred in predicates)


def apply_filters(sequences, predicates=FILTER_PREDICATES):
    """Graphs for every sequence satisfying all structural predicates."""
    return [MechanismGraph(s.seed_kind, s.layers)
            for s in sequences if passes_filters(s, predicates)]


# --- reporting buckets --------------------------------------------------
#
# Staged counts for the enumeration report.  The stages nest (each adds
# predicates to the previous one) and their conjunction equals
# passes_filters; only the bucketing is presentational.

def _drawing_node_not_on_seed_body(seq):
    history = cluster_history(seq.layers)
    for n in childless_added_nodes(seq.layers):
        p, q = seq.layers[n - 3]
        host = _cluster_containing(history[n - 3], p, q)
        if host is not None and (set(GROUND_PAIR) <= host or set(CRANK_PAIR) <= host):
            return False
    return True


def stage_counts(sequences):
    """Sequence counts after each reporting stage (pre-dedup)."""
    s1 = [s for s in sequences
          if has_unique_drawing_node(s) and _drawing_node_not_on_seed_body(s)]
    s2 = [s for s in s1
          if no_static_added_nodes(s) and drawing_node_off_ground(s)]
    s3 = [s for s in s2 if no_triangles_on_rigid_bodies(s)]
    return {
        "all": len(sequences),
        "one_drawing_node": len(s1),
        "two_fixed_nodes": len(s2),
        "no_redundant_triangles": len(s3),
    }


# --- canonical form and catalog -----------------------------------------

def canonical_form(graph):
    """Canonical code of the isomorphism class.

    Minimum over all role-respecting relabelings (the two ground pivots may
    swap, the input node is pinned, added nodes permute freely) of the
    serialized sorted link list.  Equal codes iff isomorphic.
    """
    k = graph.k
    if graph.n_nodes > 9:
        raise ValueError("canonical_form supports at most 9 nodes")
    links = graph.structural_links
    added = list(range(3, 3 + k))
    best = None
    for swap_ab in (False, True):
        base = {NODE_FIXED_A: NODE_FIXED_B, NODE_FIXED_B: NODE_FIXED_A} if swap_ab \
            else {NODE_FIXED_A: NODE_FIXED_A, NODE_FIXED_B: NODE_FIXED_B}
        base[NODE_INPUT] = NODE_INPUT
        for perm in itertools.permutations(added):
            mapping = dict(base)
            mapping.update(zip(added, perm))
            relabeled = sorted(tuple(sorted((mapping[a], mapping[b])))
                               for a, b in links)
            code = "%s|k=%d|%s" % (
                graph.seed_kind, k,
                ",".join("%d-%d" % l for l in relabeled))
            if best is None or code < best:
                best = code
    return best


def are_isomorphic(g1, g2):
    """Brute-force role-respecting isomorphism test (test oracle for the
    canonical code; deliberately independent of canonical_form)."""
    if g1.k != g2.k or g1.seed_kind != g2.seed_kind:
        return False
    target = set(g2.structural_links)
    added = list(range(3, 3 + g1.k))
    for swap_ab in (False, True):
        base = {0: 1, 1: 0, 2: 2} if swap_ab else {0: 0, 1: 1, 2: 2}
        for perm in itertools.permutations(added):
            mapping = dict(base)
            mapping.update(zip(added, perm))
            relabeled = {tuple(sorted((mapping[a], mapping[b])))
                         for a, b in g1.structural_links}
            if relabeled == target:
                return True
    return False


def build_catalog(k_max, seed_kind="revolute"):
    """Enumerate, filter and dedupe everything up to k_max layers."""
    if k_max < 0 or k_max > 5:
        raise ValueError("k_max must be in 0..5")
    prefix = "ST" if seed_kind == "slider" else "T"
    entries = []
    report = {}
    for k in range(k_max + 1):
        sequences = enumerate_sequences(k, seed_kind)
        stages = stage_counts(sequences)
        survivors = apply_filters(sequences)
        seen = {}
        for g in survivors:  # enumeration order is lexicographic, so the
            code = canonical_form(g)  # first representative is the lex-first
            if code not in seen:
                seen[code] = g
        for i, (code, g) in enumerate(seen.items()):
            entries.append(CatalogEntry(f"{prefix}{k}-{i}", g, code))
        stages["isomorphism_dedup"] = len(seen)
        report[k] = stages
    return Catalog(seed_kind, k_max, entries, report)


# --- serialization ------------------------------------------------------

def catalog_to_jsonl(catalog):
    lines = []
    for e in catalog.entries:
        rec = {
            "id": e.id,
            "k": e.graph.k,
            "seed_kind": e.graph.seed_kind,
            "parent_pairs": [list(p) for p in e.graph.layers],
            "links": [list(l) for l in e.graph.links],
            "drawing_node": e.graph.drawing_node,
            "canonical_code": e.canonical_code,
        }
        lines.append(json.dumps(rec, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def catalog_from_jsonl(text):
    entries = []
    seed_kind = "revolute"
    k_max = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        g = MechanismGraph(rec["seed_kind"], tuple(tuple(p) for p in rec["parent_pairs"]))
        entries.append(CatalogEntry(rec["id"], g, rec["canonical_code"]))
        seed_kind = rec["seed_kind"]
        k_max = max(k_max, rec["k"])
    return Catalog(seed_kind, k_max, entries)


def format_count_report(catalog):
    """Human-readable per-stage count table for the enumeration report."""
    ks = sorted(catalog.filter_report)
    rows = [
        ("all sequences", "all"),
        ("one drawing node", "one_drawing_node"),
        ("two fixed nodes", "two_fixed_nodes"),
        ("no redundant triangles", "no_redundant_triangles"),
        ("isomorphism dedup", "isomorphism_dedup"),
    ]
    header = ["stage"] + [f"T{k}" for k in ks] + ["total"]
    table = [header]
    for label, key in rows:
        vals = [catalog.filter_report[k][key] for k in ks]
        table.append([label] + [str(v) for v in vals] + [str(sum(vals))])
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    out = []
    for r in table:
        out.append("  ".join(str(v).rjust(w) for v, w in zip(r, widths)))
    return "\n".join(out)
