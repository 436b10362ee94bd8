"""Recursive injective Lipschitz embedding of the rank-2 free group into any
group carrying a validated doubling witness, plus transport of piecewise
translations along injective maps."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Mapping

from .groups import Elem, FreeGroup, FreeWord, Group, Window
from .pwt import PwT, PwTError, pwt_apply, pwt_compose
from .sets import FiniteSet, SetContext, context_for, materialize
from .witness import ParadoxWitness, base_translation_maps, witness_check

F2 = FreeGroup(2)


class EmbeddingWindowError(RuntimeError):
    """The recursion needs values outside the window the witness was
    validated on; rebuild the witness on a larger window."""


@dataclass
class EmbeddingData:
    """The four branch maps and base point driving the word-by-word recursion
    f(c x') = map_c(f(x')), f(e) = base point."""

    group: Group
    sigma_plus: PwT
    sigma_minus: PwT
    tau_plus: PwT
    tau_minus: PwT
    base_point: Elem
    ctx: SetContext
    _memo: dict[tuple[int, ...], Elem] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def branch_maps(self) -> tuple[PwT, PwT, PwT, PwT]:
        return (self.sigma_plus, self.sigma_minus, self.tau_plus, self.tau_minus)


def build_embedding(w: ParadoxWitness, window: Window,
                    ctx: SetContext | None = None) -> EmbeddingData:
    """Derive four pairwise-disjoint-image maps and an unhit base point from a
    validated two-map witness: depth-three composites inside the plus branch,
    base point from the minus branch."""
    if ctx is None:
        ctx = context_for(window)
    group = ctx.group
    report = witness_check(w, window, ctx)
    if not report.passed:
        raise ValueError(f"witness fails validation: {report.failures()}")
    base = materialize(w.set_expr, window, ctx)
    if not base.elements:
        raise ValueError("the witness set has an empty window slice")
    plus, minus = base_translation_maps(w, group)
    branches = []
    for eps in (plus, minus):
        for delta in (plus, minus):
            branches.append(pwt_compose(plus, pwt_compose(eps, delta, ctx=ctx), ctx=ctx))
    first = base.elements[0]
    base_point = pwt_apply(minus, first, ctx)

    data = EmbeddingData(group, *branches, base_point, ctx)
    _check_disjoint_images(data, base.elements)
    return data


def _check_disjoint_images(data: EmbeddingData, points) -> None:
    group, ctx = data.group, data.ctx
    image_sets = []
    for mp in data.branch_maps():
        images = set()
        for g in points:
            try:
                images.add(pwt_apply(mp, g, ctx))
            except PwTError:
                # window-scoped witnesses define the composites only partially
                continue
        image_sets.append(images)
    image_sets.append({data.base_point})
    for i in range(len(image_sets)):
        for j in range(i + 1, len(image_sets)):
            common = image_sets[i] & image_sets[j]
            if common:
                g = next(iter(common))
                raise AssertionError(
                    f"branch images {i} and {j} overlap at {group.show(g)}"
                )


def eval_embedding(data: EmbeddingData, word: FreeWord | tuple[int, ...]) -> Elem:
    """Evaluate the embedding on a reduced rank-2 free word."""
    letters = word.letters if isinstance(word, FreeWord) else tuple(word)
    for i, x in enumerate(letters):
        if x == 0 or abs(x) > 2:
            raise ValueError(f"letter {x} is not one of the two generators")
        if i and letters[i - 1] == -x:
            raise ValueError(f"word {letters} is not reduced")
    maps = {
        1: data.sigma_plus,
        -1: data.sigma_minus,
        2: data.tau_plus,
        -2: data.tau_minus,
    }
    with data._lock:
        # reuse the longest memoised suffix, then extend letter by letter
        start = len(letters)
        for k in range(len(letters)):
            if letters[k:] in data._memo:
                start = k
                break
        value = data._memo[letters[start:]] if start < len(letters) else data.base_point
        for k in range(start - 1, -1, -1):
            try:
                value = pwt_apply(maps[letters[k]], value, data.ctx)
            except PwTError as exc:
                raise EmbeddingWindowError(
                    f"evaluation left the validated window after "
                    f"{len(letters) - 1 - k} of {len(letters)} letters; rebuild "
                    f"the witness on a larger window (word {letters})"
                ) from exc
            data._memo[letters[k:]] = value
        return value


@dataclass(frozen=True)
class LipschitzReport:
    """Exhaustive check on the free-group ball of the stated radius."""

    radius: int
    injective: bool
    value_count: int
    displacement_set: tuple[Elem, ...]  # observed displacements and inverses
    collisions: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    violations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]


def check_injective_lipschitz(data: EmbeddingData, radius: int) -> LipschitzReport:
    """Evaluate on the whole rank-2 ball; verify injectivity and that adjacent
    words (one-letter difference) have displacements inside the computed set."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    group = data.group
    words = [w.letters for w in F2.ball_elements(radius)]
    values: dict[tuple[int, ...], Elem] = {}
    seen: dict[Elem, tuple[int, ...]] = {}
    collisions = []
    for w in words:
        v = eval_embedding(data, w)
        values[w] = v
        if v in seen:
            collisions.append((seen[v], w))
        else:
            seen[v] = w

    observed = set()
    for w in words:
        if len(w) >= radius:
            continue
        for c in (1, -1, 2, -2):
            if w and w[0] == -c:
                continue
            cw = (c,) + w
            observed.add(group.mul(values[cw], group.inv(values[w])))
    t_set = set(observed) | {group.inv(d) for d in observed}

    violations = []
    word_set = set(words)
    for w in words:
        for c in (1, -1, 2, -2):
            x = _reduce_prepend(c, w)
            if x not in word_set:
                continue
            d = group.mul(values[x], group.inv(values[w]))
            if d not in t_set:
                violations.append((x, w))
    ordered = tuple(sorted(t_set, key=group.sort_key))
    return LipschitzReport(
        radius,
        not collisions,
        len(seen),
        ordered,
        tuple(collisions),
        tuple(violations),
    )


def _reduce_prepend(c: int, w: tuple[int, ...]) -> tuple[int, ...]:
    if w and w[0] == -c:
        return w[1:]
    return (c,) + w


def transported_pwt(
    f_map: Mapping[Elem, Elem], sigma: PwT, window: Window,
    ctx: SetContext | None = None, target_ctx: SetContext | None = None
) -> PwT:
    """Push a piecewise translation through an injective map: the result sends
    f(x) to f(sigma(x)), with pieces grouped by the observed displacement.

    `ctx` evaluates sigma on the source group; `target_ctx` supplies the
    target group (defaults to the window's group).
    """
    if ctx is None:
        ctx = context_for(window)
    if target_ctx is None:
        target_ctx = ctx
    target = target_ctx.group
    inverse: dict[Elem, Elem] = {}
    for x, fx in f_map.items():
        if fx in inverse:
            raise ValueError(
                f"map is not injective: {inverse[fx]!r} and {x!r} share an image"
            )
        inverse[fx] = x
    source_group = ctx.group
    keys = sorted(f_map.keys(), key=source_group.sort_key)
    blocks: dict[Elem, list[Elem]] = {}
    for x in keys:
        from .sets import member

        if member(sigma.domain, x, ctx) is not True:
            continue
        sx = pwt_apply(sigma, x, ctx)
        if sx not in f_map:
            continue
        disp = target.mul(f_map[sx], target.inv(f_map[x]))
        blocks.setdefault(disp, []).append(f_map[x])
    pieces = tuple(
        (FiniteSet(tuple(blocks[d])), d)
        for d in sorted(blocks, key=target.sort_key)
    )
    domain = FiniteSet(tuple(g for piece, _ in pieces for g in piece.elems))
    return PwT(domain, pieces, tuple(sorted(blocks, key=target.sort_key)))
