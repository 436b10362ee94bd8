"""Two-to-one covering witnesses of paradoxicality: construction from free
semigroups, window checking, and the derived disjoint-image translation maps.

Everything here is checker-side; no matching or flow solver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import Elem, Group, Window, explicit_window
from .pwt import PwT, ValidationReport, pwt_apply, pwt_compose
from .sets import (
    Diff,
    SemigroupSet,
    SetContext,
    SetExpr,
    context_for,
    materialize,
    member_strict,
    positive_words,
    translate,
)


@dataclass(frozen=True)
class ParadoxWitness:
    """Pieces A_j inside `set_expr` and translators t_j with both families
    (indices < split and >= split) of translated pieces covering the set."""

    set_expr: SetExpr
    parts: tuple[tuple[SetExpr, Elem], ...]
    split: int


@dataclass(frozen=True)
class Collision:
    """Two distinct positive words with the same value; the generators are
    not free up to the requested length."""

    word_a: tuple[int, ...]
    word_b: tuple[int, ...]
    value: Elem


def free_semigroup_witness(
    group: Group, s: Elem, t: Elem, depth: int
) -> ParadoxWitness | Collision:
    """If all positive words in {s, t} of length <= depth are distinct, emit
    the two-piece witness for the generated semigroup (with identity)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    group.check(s), group.check(t)
    gens = (s, t)
    seen: dict[Elem, tuple[int, ...]] = {group.identity(): ()}
    frontier: list[tuple[Elem, tuple[int, ...]]] = [(group.identity(), ())]
    for _ in range(depth):
        new = []
        for value, word in frontier:
            for idx, gen in enumerate(gens):
                v = group.mul(value, gen)
                w = word + (idx,)
                if v in seen:
                    return Collision(seen[v], w, v)
                seen[v] = w
                new.append((v, w))
        frontier = new
    semigroup = SemigroupSet(gens, True)
    parts = (
        (translate(s, semigroup, group), group.inv(s)),
        (translate(t, semigroup, group), group.inv(t)),
    )
    return ParadoxWitness(semigroup, parts, 1)


def semigroup_window(group: Group, s: Elem, t: Elem, depth: int) -> Window:
    """Window holding the distinct positive words of length <= depth."""
    return explicit_window(group, positive_words(group, (s, t), depth), depth)


def _piece_points(piece: SetExpr, window: Window, ctx: SetContext) -> list[Elem]:
    """Probe points of a piece: full content when syntactically finite,
    otherwise its window slice."""
    from .sets import FiniteSet, Translate

    if isinstance(piece, FiniteSet):
        return list(piece.elems)
    if isinstance(piece, Translate) and isinstance(piece.inner, FiniteSet):
        return [ctx.group.mul(piece.t, e) for e in piece.inner.elems]
    return list(materialize(piece, window, ctx).elements)


def witness_check(w: ParadoxWitness, window: Window,
                  ctx: SetContext | None = None) -> ValidationReport:
    """Verify piece disjointness, containment in the ambient set, and both
    covering identities, window-relatively."""
    if ctx is None:
        ctx = context_for(window)
    group = ctx.group
    checks = []

    ok = 0 <= w.split <= len(w.parts)
    checks.append(("split-in-range", ok, "" if ok else f"split {w.split}"))
    if not ok:
        return ValidationReport(tuple(checks))

    points = [_piece_points(piece, window, ctx) for piece, _ in w.parts]
    sets = [set(p) for p in points]
    bad = ""
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            common = sets[i] & sets[j]
            if common:
                g = min(common, key=group.sort_key)
                bad = f"pieces {i} and {j} share {group.show(g)}"
                break
        if bad:
            break
    checks.append(("pieces-disjoint", not bad, bad))

    bad = ""
    for i, pts in enumerate(points):
        for g in pts:
            if member_strict(w.set_expr, g, ctx) is False:
                bad = f"piece {i} contains {group.show(g)} outside the set"
                break
        if bad:
            break
    checks.append(("pieces-inside-set", not bad, bad))

    base = materialize(w.set_expr, window, ctx)
    if not base.complete:
        checks.append(
            ("membership-decided", False, f"{len(base.undecided)} undecided points")
        )
    for fam, label in ((range(0, w.split), "first"), (range(w.split, len(w.parts)), "second")):
        fam = list(fam)
        bad = ""
        for g in base.elements:
            covered = False
            for j in fam:
                piece, t = w.parts[j]
                if member_strict(piece, group.mul(group.inv(t), g), ctx):
                    covered = True
                    break
            if not covered:
                bad = f"{group.show(g)} not covered by the {label} family"
                break
        checks.append((f"{label}-family-covers", not bad, bad))
        bad = ""
        for j in fam:
            piece, t = w.parts[j]
            for g in points[j]:
                if member_strict(w.set_expr, group.mul(t, g), ctx) is False:
                    bad = (
                        f"translated piece {j} leaves the set at "
                        f"{group.show(group.mul(t, g))}"
                    )
                    break
            if bad:
                break
        checks.append((f"{label}-family-inside", not bad, bad))
    return ValidationReport(tuple(checks))


def base_translation_maps(w: ParadoxWitness, group: Group) -> tuple[PwT, PwT]:
    """The two disjoint-image piecewise translations encoded by a witness:
    on t_j*A_j (first unclaimed j of the family), map x -> t_j^(-1)*x."""

    def family(indices: list[int]) -> PwT:
        pieces = []
        claimed: SetExpr | None = None
        for j in indices:
            part, t = w.parts[j]
            region = translate(t, part, group)
            piece = region if claimed is None else Diff(region, claimed)
            pieces.append((piece, group.inv(t)))
            claimed = region if claimed is None else _union(claimed, region)
        displacement = sorted({t for _, t in pieces}, key=group.sort_key)
        return PwT(w.set_expr, tuple(pieces), tuple(displacement))

    first = family(list(range(0, w.split)))
    second = family(list(range(w.split, len(w.parts))))
    return first, second


def _union(a: SetExpr, b: SetExpr) -> SetExpr:
    from .sets import Union

    return Union(a, b)


def iterate_disjoint(w: ParadoxWitness, n: int, window: Window,
                     ctx: SetContext | None = None) -> list[PwT]:
    """n piecewise translations of the witness set into itself with pairwise
    disjoint images, built by composing the two base maps along a binary tree."""
    if n < 2:
        raise ValueError("need n >= 2")
    if ctx is None:
        ctx = context_for(window)
    report = witness_check(w, window, ctx)
    if not report.passed:
        raise ValueError(f"witness fails validation: {report.failures()}")
    group = ctx.group
    plus, minus = base_translation_maps(w, group)
    depth = max(1, (n - 1).bit_length())
    # leaves in sign order (+...+, ..., -...-), composing heads on the left
    maps = _tree_leaves(plus, minus, depth, ctx)
    chosen = maps[:n]
    images = []
    for mp in chosen:
        base = materialize(mp.domain, window, ctx)
        images.append({pwt_apply(mp, g, ctx) for g in base.elements})
    for i in range(len(chosen)):
        for j in range(i + 1, len(chosen)):
            if images[i] & images[j]:
                raise AssertionError(f"images {i} and {j} overlap on the window")
    return chosen


def _tree_leaves(plus: PwT, minus: PwT, depth: int, ctx: SetContext) -> list[PwT]:
    if depth == 1:
        return [plus, minus]
    inner = _tree_leaves(plus, minus, depth - 1, ctx)
    out = []
    for head in (plus, minus):
        for tail in inner:
            out.append(pwt_compose(head, tail, ctx=ctx))
    return out
