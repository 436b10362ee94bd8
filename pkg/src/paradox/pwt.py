"""Piecewise translations, equidecomposability witnesses, and the finite-cover
(boundedness) search, all validated exactly on windows."""

from __future__ import annotations

from dataclasses import dataclass

from .groups import Elem, Window
from .sets import (
    Intersect,
    SetContext,
    SetExpr,
    context_for,
    materialize,
    member,
    member_strict,
    translate,
)


class PwTError(ValueError):
    """Domain or piece-structure violation when applying a piecewise translation."""


@dataclass(frozen=True)
class PwT:
    """A piecewise translation: on each piece, left-multiply by its translator.

    The map is x -> t_i * x for the unique piece i containing x; all
    displacements stay inside the finite `displacement` set.
    """

    domain: SetExpr
    pieces: tuple[tuple[SetExpr, Elem], ...]
    displacement: tuple[Elem, ...]

    @staticmethod
    def single(domain: SetExpr, t: Elem) -> "PwT":
        return PwT(domain, ((domain, t),), (t,))


def pwt_apply(p: PwT, g: Elem, ctx: SetContext) -> Elem:
    group = ctx.group
    if not member_strict(p.domain, g, ctx):
        raise PwTError(f"{group.show(g)} is outside the domain")
    hits = [t for piece, t in p.pieces if member_strict(piece, g, ctx)]
    if not hits:
        raise PwTError(f"{group.show(g)} is in the domain but in no piece")
    if len(hits) > 1:
        raise PwTError(f"{group.show(g)} lies in {len(hits)} pieces")
    return group.mul(hits[0], g)


def pwt_compose(outer: PwT, inner: PwT, window: Window | None = None,
                ctx: SetContext | None = None) -> PwT:
    """Compose: outer applied after inner.  When a window is given, composability (the image of
    inner lands in outer's domain) is checked on it."""
    if ctx is None and window is not None:
        ctx = context_for(window)
    group = ctx.group if ctx else None
    if window is not None:
        assert ctx is not None
        for g in materialize(inner.domain, window, ctx).elements:
            img = pwt_apply(inner, g, ctx)
            if not member_strict(outer.domain, img, ctx):
                raise PwTError(
                    f"image {ctx.group.show(img)} of {ctx.group.show(g)} "
                    "escapes the outer domain"
                )
    if group is None:
        raise ValueError("pwt_compose needs a window or a context for the group")
    pieces = []
    for ipiece, s in inner.pieces:
        s_inv = group.inv(s)
        for opiece, u in outer.pieces:
            piece = Intersect(ipiece, translate(s_inv, opiece, group))
            pieces.append((piece, group.mul(u, s)))
    displacement = sorted({t for _, t in pieces}, key=group.sort_key)
    return PwT(inner.domain, tuple(pieces), tuple(displacement))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a window check; failures carry a witness element per check."""

    checks: tuple[tuple[str, bool, str], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, msg) for name, ok, msg in self.checks if not ok]

    def __str__(self) -> str:
        return "; ".join(
            f"{name}: {'ok' if ok else 'FAIL ' + msg}" for name, ok, msg in self.checks
        )


def pwt_validate(p: PwT, window: Window, ctx: SetContext | None = None) -> ValidationReport:
    """Check piece disjointness, coverage of the domain slice, injectivity and
    displacement confinement, all restricted to the window."""
    if ctx is None:
        ctx = context_for(window)
    group = ctx.group
    checks = []

    dom = materialize(p.domain, window, ctx)
    piece_hits: dict[Elem, list[int]] = {g: [] for g in dom.elements}
    for idx, (piece, _) in enumerate(p.pieces):
        for g in dom.elements:
            if member(piece, g, ctx) is True:
                piece_hits[g].append(idx)

    overlap = next((g for g, hits in piece_hits.items() if len(hits) > 1), None)
    checks.append(
        (
            "pieces-disjoint",
            overlap is None,
            "" if overlap is None else f"{group.show(overlap)} lies in pieces "
            f"{piece_hits[overlap]}",
        )
    )
    uncovered = next((g for g, hits in piece_hits.items() if not hits), None)
    checks.append(
        (
            "pieces-cover-domain",
            uncovered is None,
            "" if uncovered is None else f"{group.show(uncovered)} is uncovered",
        )
    )

    images: dict[Elem, tuple[Elem, int]] = {}
    collision = None
    for g, hits in piece_hits.items():
        for idx in hits:
            img = group.mul(p.pieces[idx][1], g)
            if img in images and (images[img][0] != g or images[img][1] != idx):
                collision = (g, images[img][0], img)
                break
            images[img] = (g, idx)
        if collision:
            break
    checks.append(
        (
            "injective",
            collision is None,
            ""
            if collision is None
            else f"{group.show(collision[0])} and {group.show(collision[1])} "
            f"both map to {group.show(collision[2])}",
        )
    )

    stray = next((t for _, t in p.pieces if t not in p.displacement), None)
    checks.append(
        (
            "displacement-set",
            stray is None,
            "" if stray is None else f"translator {group.show(stray)} undeclared",
        )
    )
    if not dom.complete:
        checks.append(
            (
                "membership-decided",
                False,
                f"{len(dom.undecided)} window points undecided at budget {ctx.budget}",
            )
        )
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class EquiWitness:
    """Matched partitions witnessing piecewise-translation equivalence:
    parts_a[j] = translators[j] * parts_b[j]."""

    parts_a: tuple[SetExpr, ...]
    parts_b: tuple[SetExpr, ...]
    translators: tuple[Elem, ...]


def check_equi_witness(w: EquiWitness, window: Window,
                       ctx: SetContext | None = None) -> ValidationReport:
    if ctx is None:
        ctx = context_for(window)
    group = ctx.group
    checks = []
    ok_len = len(w.parts_a) == len(w.parts_b) == len(w.translators)
    checks.append(("lengths-match", ok_len, "" if ok_len else "ragged part lists"))
    if not ok_len:
        return ValidationReport(tuple(checks))

    for label, parts in (("a", w.parts_a), ("b", w.parts_b)):
        mats = [set(materialize(p, window, ctx).elements) for p in parts]
        bad = ""
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                common = mats[i] & mats[j]
                if common:
                    g = next(iter(common))
                    bad = f"parts {i} and {j} share {group.show(g)}"
                    break
            if bad:
                break
        checks.append((f"parts-{label}-disjoint", not bad, bad))

    win_set = set(window.elements)
    for j, (pa, pb, t) in enumerate(zip(w.parts_a, w.parts_b, w.translators)):
        # compare inside W and t.W: each probe point is checked both ways
        bad = ""
        for g in window.elements:
            tg = group.mul(t, g)
            if tg not in win_set:
                continue
            lhs = member_strict(pa, tg, ctx)
            rhs = member_strict(pb, g, ctx)
            if lhs != rhs:
                bad = (
                    f"part {j}: {group.show(tg)} is "
                    f"{'in' if lhs else 'not in'} parts_a[{j}] but "
                    f"{group.show(g)} is {'in' if rhs else 'not in'} parts_b[{j}]"
                )
                break
        checks.append((f"part-{j}-translated", not bad, bad))
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class FiniteCover:
    """A finite set F with (A intersect W) covered by the translates t*B, t in F."""

    translators: tuple[Elem, ...]


def bounded_check(a: SetExpr, b: SetExpr, search_radius: int, window: Window,
                  ctx: SetContext | None = None) -> FiniteCover | None:
    """Greedy search for finitely many translates of b covering a's window
    slice.  None means the search was exhausted, not that no cover exists."""
    if ctx is None:
        ctx = context_for(window)
    group = ctx.group
    targets = materialize(a, window, ctx)
    if not targets.complete:
        raise ValueError(
            f"{len(targets.undecided)} membership queries undecided; raise the budget"
        )
    remaining = set(targets.elements)
    candidates = group.ball_elements(search_radius)
    coverage = []
    for t in candidates:
        t_inv = group.inv(t)
        covered = {
            g for g in targets.elements if member_strict(b, group.mul(t_inv, g), ctx)
        }
        coverage.append((t, covered))
    chosen: list[Elem] = []
    while remaining:
        best = None
        best_gain = 0
        for t, covered in coverage:
            gain = len(covered & remaining)
            if gain > best_gain:
                best, best_gain = t, gain
        if best is None:
            return None
        chosen.append(best)
        for t, covered in coverage:
            if t == best:
                remaining -= covered
                break
    return FiniteCover(tuple(chosen))
