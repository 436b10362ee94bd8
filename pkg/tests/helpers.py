"""Independent oracles used to cross-check the package's algorithms.

These deliberately avoid the package's matching, flow, and enumeration code
paths: brute-force word enumeration, Kuhn's augmenting-path matching, and
subset-exhaustive Hall checks.
"""

from __future__ import annotations

import itertools


def brute_free_ball(rank: int, radius: int) -> set[tuple[int, ...]]:
    """All reduced words of length <= radius by filtering raw products."""
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    out = {()}
    for length in range(1, radius + 1):
        for combo in itertools.product(letters, repeat=length):
            if all(combo[i] != -combo[i + 1] for i in range(length - 1)):
                out.add(combo)
    return out


def brute_positive_words(group, gens, length):
    """Values of all positive words up to the given length, by direct product."""
    values = {group.identity()}
    for n in range(1, length + 1):
        for combo in itertools.product(gens, repeat=n):
            v = group.identity()
            for g in combo:
                v = group.mul(v, g)
            values.add(v)
    return values


def kuhn_matching(lefts, adjacency):
    """Classic augmenting-path maximum matching (no BFS layering), used as an
    oracle independent of the package's Hopcroft-Karp implementation."""
    pair_right: dict = {}

    def try_augment(u, seen) -> bool:
        for v in adjacency[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in pair_right or try_augment(pair_right[v], seen):
                pair_right[v] = u
                return True
        return False

    size = 0
    for u in lefts:
        if try_augment(u, set()):
            size += 1
    return size


def doubling_exists_oracle(group, points, s_list, member_fn) -> bool:
    """Does a two-fold matching exist?  Decided by Kuhn's algorithm on the
    doubled graph, fully independently of the engine."""
    lefts = [(x, i) for x in points for i in (0, 1)]
    adjacency = {}
    for x, i in lefts:
        adjacency[(x, i)] = [
            group.mul(s, x) for s in s_list if member_fn(group.mul(s, x))
        ]
    return kuhn_matching(lefts, adjacency) == len(lefts)


# ---- certificate mutations --------------------------------------------------
#
# Every operator below is invalidating by construction (see the comments), so
# a verifier that accepts a mutated certificate has a soundness hole.

import copy

from paradox.certificates import content_digest
from paradox.groups import group_from_string


def _redigest(cert):
    cert["digest"] = content_digest(cert)
    return cert


def _far_element(group):
    g = group.identity()
    for gen in (group.generators()[0],) * 9:
        g = group.mul(g, gen)
    return group.show(g)


def mutation_operators(cert):
    """Applicable (name, function) pairs for one certificate dict; each
    function returns a mutated copy that must fail verification."""
    group = group_from_string(cert["group"])
    kind = cert["kind"]
    ops = []

    def op(name):
        def register(fn):
            ops.append((name, fn))
            return fn

        return register

    if kind == "match" and cert["assignment"]:

        @op("match-equal-translators")
        def _(c, rng):
            # the two images of one point collide
            row = rng.randrange(len(c["assignment"]))
            c["assignment"][row][1] = c["assignment"][row][2]
            return _redigest(c)

        @op("match-drop-entry")
        def _(c, rng):
            # the assignment no longer covers the window slice
            c["assignment"].pop(rng.randrange(len(c["assignment"])))
            return _redigest(c)

        @op("match-undeclared-translator")
        def _(c, rng):
            row = rng.randrange(len(c["assignment"]))
            c["assignment"][row][1] = _far_element(group)
            return _redigest(c)

    if kind in ("deficiency", "flow-deficiency") and cert["violator"]:

        @op("violator-foreign-point")
        def _(c, rng):
            # the inserted point lies far outside every tested window
            c["violator"].append(_far_element(group))
            return _redigest(c)

        @op("violator-emptied")
        def _(c, rng):
            c["violator"] = []
            return _redigest(c)

        @op("violator-duplicate")
        def _(c, rng):
            c["violator"].append(c["violator"][0])
            return _redigest(c)

    if kind == "witness" and cert["parts"]:

        @op("witness-duplicate-piece")
        def _(c, rng):
            # nonempty duplicated piece breaks disjointness
            row = rng.randrange(len(c["parts"]))
            c["parts"].insert(row, copy.deepcopy(c["parts"][row]))
            return _redigest(c)

        @op("witness-drop-piece")
        def _(c, rng):
            # every emitted piece is nonempty, so a family loses coverage
            c["parts"].pop(rng.randrange(len(c["parts"])))
            return _redigest(c)

        @op("witness-shift-translator")
        def _(c, rng):
            # finite nonempty blocks are never translation invariant
            row = rng.randrange(len(c["parts"]))
            t = group.parse(c["parts"][row]["translator"])
            gen = group.generators()[rng.randrange(len(group.generators()))]
            c["parts"][row]["translator"] = group.show(group.mul(t, gen))
            return _redigest(c)

    if kind == "flow" and cert["assignment"]:

        @op("flow-drop-entry")
        def _(c, rng):
            c["assignment"].pop(rng.randrange(len(c["assignment"])))
            return _redigest(c)

        @op("flow-undeclared-translator")
        def _(c, rng):
            row = rng.randrange(len(c["assignment"]))
            c["assignment"][row][1][0] = _far_element(group)
            return _redigest(c)

        @op("flow-wrong-copy-count")
        def _(c, rng):
            row = rng.randrange(len(c["assignment"]))
            c["assignment"][row][1].append(c["assignment"][row][1][0])
            return _redigest(c)

    if kind == "cp-witness":

        @op("cp-retarget-unitary")
        def _(c, rng):
            # multiplying one unitary label breaks an isometry identity
            side = rng.choice(["v", "w"])
            row = rng.randrange(len(c[side]))
            t = group.parse(c[side][row][0])
            gen = group.generators()[rng.randrange(len(group.generators()))]
            c[side][row][0] = group.show(group.mul(t, gen))
            return _redigest(c)

        @op("cp-empty-coefficient")
        def _(c, rng):
            side = rng.choice(["v", "w"])
            row = rng.randrange(len(c[side]))
            c[side][row][1] = [["1", "empty"]]
            return _redigest(c)

    @op("stale-digest")
    def _(c, rng):
        # semantic field edited without recomputing the content digest
        c["budgetSlack"] = int(c.get("budgetSlack", 4)) + 1
        return c

    @op("window-retagged")
    def _(c, rng):
        # the recorded window digest no longer matches the descriptor
        c["window"] = dict(c["window"])
        c["window"]["radius"] = int(c["window"]["radius"]) + 1
        return _redigest(c)

    return ops


def mutate_certificate(cert, rng):
    """Pick one invalidating mutation at random; returns (name, mutated)."""
    ops = mutation_operators(cert)
    name, fn = ops[rng.randrange(len(ops))]
    return name, fn(copy.deepcopy(cert), rng)
