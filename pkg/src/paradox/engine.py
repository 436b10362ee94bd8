"""Window-exact doubling decisions: either a two-fold matching of a set into
itself with displacements from a fixed translator set, or a finite Hall-style
obstruction.  Also the capacitated generalisation m[A] <= n[B] via max-flow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .flow import FlowNetwork
from .groups import Elem, Group, Window
from .matching import alternating_reachable, max_matching
from .sets import (
    BUDGET_EXCEEDED,
    BudgetError,
    FiniteSet,
    SetContext,
    SetExpr,
    context_for,
    materialize,
    member,
)
from .witness import ParadoxWitness


@dataclass(frozen=True)
class MatchCert:
    """For each window point x of the set, two translators whose images are
    globally pairwise distinct and stay inside the set."""

    group: Group
    set_expr: SetExpr
    translators: tuple[Elem, ...]
    window: Window
    assignment: tuple[tuple[Elem, Elem, Elem], ...]  # (x, s1, s2)


@dataclass(frozen=True)
class DeficiencyCert:
    """A finite violator D inside the window with |S.D intersect A| < 2|D|:
    no doubling matching can exist for this translator set."""

    group: Group
    set_expr: SetExpr
    translators: tuple[Elem, ...]
    window: Window
    violator: tuple[Elem, ...]


def _window_slice(a: SetExpr, window: Window, ctx: SetContext) -> list[Elem]:
    mat = materialize(a, window, ctx)
    if not mat.complete:
        raise BudgetError(
            f"{len(mat.undecided)} window memberships undecided at budget "
            f"{ctx.budget}; increase the budget slack"
        )
    return list(mat.elements)


def _image_members(
    a: SetExpr, points: list[Elem], s_list: list[Elem], ctx: SetContext
) -> dict[tuple[Elem, Elem], bool]:
    """(s, x) -> whether s*x lies in a, demanding exact answers."""
    group = ctx.group
    out = {}
    for x in points:
        for s in s_list:
            img = group.mul(s, x)
            res = member(a, img, ctx)
            if res is BUDGET_EXCEEDED:
                raise BudgetError(
                    f"membership of {group.show(img)} undecided at budget "
                    f"{ctx.budget}; increase the budget slack"
                )
            out[(s, x)] = res
    return out


def doubling_matching(
    a: SetExpr,
    translators: list[Elem] | tuple[Elem, ...],
    window: Window,
    slack: int = 4,
) -> MatchCert | DeficiencyCert:
    """Decide two-into-one window doubling for the given translator set.

    Fast path: when the full window slice already violates the counting bound
    (fewer than twice as many reachable targets as sources), it is emitted as
    the violator directly.  Otherwise a maximum matching is built and, on
    failure, the violator comes from the final alternating-reachability cut.
    """
    if not translators:
        raise ValueError("translator set must be nonempty")
    ctx = context_for(window, slack)
    group = ctx.group
    s_list = sorted(set(translators), key=group.sort_key)
    points = _window_slice(a, window, ctx)
    edges = _image_members(a, points, s_list, ctx)

    targets = {}
    for x in points:
        for s in s_list:
            if edges[(s, x)]:
                targets.setdefault(group.mul(s, x), None)
    if len(targets) < 2 * len(points):
        return DeficiencyCert(
            group, a, tuple(s_list), window, tuple(points)
        )

    lefts = [(x, i) for x in points for i in (0, 1)]
    adjacency = {
        (x, i): [group.mul(s, x) for s in s_list if edges[(s, x)]]
        for x, i in lefts
    }
    pair_left, pair_right = max_matching(lefts, adjacency)
    if len(pair_left) == len(lefts):
        assignment = []
        for x in points:
            img1, img2 = pair_left[(x, 0)], pair_left[(x, 1)]
            x_inv = group.inv(x)
            assignment.append((x, group.mul(img1, x_inv), group.mul(img2, x_inv)))
        return MatchCert(group, a, tuple(s_list), window, tuple(assignment))
    reached = alternating_reachable(lefts, adjacency, pair_left, pair_right)
    violator = [x for x in points if (x, 0) in reached or (x, 1) in reached]
    return DeficiencyCert(group, a, tuple(s_list), window, tuple(violator))


def witness_from_matching(cert: MatchCert) -> ParadoxWitness:
    """Regroup a doubling matching by translator into a window-scoped witness:
    pieces are the translated blocks, translators their inverses."""
    group = cert.group
    parts = []
    split = 0
    for copy in (0, 1):
        for s in cert.translators:
            block = [
                group.mul(s, x)
                for (x, s1, s2) in cert.assignment
                if (s1 if copy == 0 else s2) == s
            ]
            if block:
                parts.append((FiniteSet(tuple(block)), group.inv(s)))
                if copy == 0:
                    split += 1
    return ParadoxWitness(cert.set_expr, tuple(parts), split)


def symbolic_witness_from_matching(cert: MatchCert) -> ParadoxWitness | None:
    """When both copies use a single constant translator, lift the witness to
    symbolic pieces s*A and t*A; callers must re-validate with witness_check.
    Returns None when the matching has no constant-translator structure."""
    from .sets import translate as _translate

    group = cert.group
    firsts = {s1 for _, s1, _ in cert.assignment}
    seconds = {s2 for _, _, s2 in cert.assignment}
    if len(firsts) != 1 or len(seconds) != 1:
        return None
    s = next(iter(firsts))
    t = next(iter(seconds))
    parts = (
        (_translate(s, cert.set_expr, group), group.inv(s)),
        (_translate(t, cert.set_expr, group), group.inv(t)),
    )
    return ParadoxWitness(cert.set_expr, parts, 1)


@dataclass(frozen=True)
class FlowCert:
    """Integral assignment sending m copies of every window point of set_a
    into set_b with at most n arrivals per target."""

    group: Group
    copies: int  # m
    set_a: SetExpr
    capacity: int  # n
    set_b: SetExpr
    translators: tuple[Elem, ...]
    window: Window
    assignment: tuple[tuple[Elem, tuple[Elem, ...]], ...]  # (x, m translators)


@dataclass(frozen=True)
class FlowDeficiency:
    """Finite D with m|D| > n|S.D intersect B|, refuting the comparison."""

    group: Group
    copies: int
    set_a: SetExpr
    capacity: int
    set_b: SetExpr
    translators: tuple[Elem, ...]
    window: Window
    violator: tuple[Elem, ...]


def type_order(
    copies: int,
    a: SetExpr,
    capacity: int,
    b: SetExpr,
    translators: list[Elem] | tuple[Elem, ...],
    window: Window,
    slack: int = 4,
) -> FlowCert | FlowDeficiency:
    """Decide whether m copies of a's window slice inject into b with
    multiplicity at most n, displacements drawn from the translator set."""
    if copies < 1 or capacity < 1:
        raise ValueError("copies and capacity must be >= 1")
    if not translators:
        raise ValueError("translator set must be nonempty")
    ctx = context_for(window, slack)
    group = ctx.group
    s_list = sorted(set(translators), key=group.sort_key)
    points = _window_slice(a, window, ctx)
    edges = _image_members(b, points, s_list, ctx)

    rights: list[Elem] = []
    right_id: dict[Elem, int] = {}
    adj: list[list[tuple[int, Elem]]] = []
    for x in points:
        row = []
        for s in s_list:
            if edges[(s, x)]:
                img = group.mul(s, x)
                if img not in right_id:
                    right_id[img] = len(rights)
                    rights.append(img)
                row.append((right_id[img], s))
        adj.append(row)

    n_nodes = 2 + len(points) + len(rights)
    source, sink = 0, n_nodes - 1
    net = FlowNetwork(n_nodes)
    for i in range(len(points)):
        net.add_edge(source, 1 + i, copies)
    # middle edges are effectively uncapacitated so a min cut never uses one
    # and the residual-reachable rights contain the whole neighbourhood
    big = copies * len(points) + 1
    mid_edges: list[list[tuple[int, Elem]]] = []
    for i, row in enumerate(adj):
        mids = []
        for rid, s in row:
            eid = net.add_edge(1 + i, 1 + len(points) + rid, big)
            mids.append((eid, s))
        mid_edges.append(mids)
    for rid in range(len(rights)):
        net.add_edge(1 + len(points) + rid, sink, capacity)

    total = net.max_flow(source, sink)
    if total == copies * len(points):
        assignment = []
        for i, x in enumerate(points):
            used: list[Elem] = []
            for eid, s in mid_edges[i]:
                used.extend([s] * net.flow_on(eid))
            assignment.append((x, tuple(used)))
        return FlowCert(
            group, copies, a, capacity, b, tuple(s_list), window, tuple(assignment)
        )
    reachable = net.residual_reachable(source)
    violator = [x for i, x in enumerate(points) if (1 + i) in reachable]
    return FlowDeficiency(
        group, copies, a, capacity, b, tuple(s_list), window, tuple(violator)
    )
