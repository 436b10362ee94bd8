"""Exact symbolic arithmetic for finite sums of (coefficient, group unitary)
terms, where coefficients are rational combinations of set indicators.  Enough
to build and re-check proper-infiniteness witnesses and corner compressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import Elem, Group, Window
from .sets import (
    AllSet,
    Intersect,
    SetContext,
    SetExpr,
    context_for,
    member_strict,
    show_setexpr,
    translate,
)
from .witness import ParadoxWitness

# a coefficient is a merged, deterministically ordered sum q_1*1_{A_1} + ...
Coefficient = tuple[tuple[Fraction, SetExpr], ...]


def _canon_coeff(terms: list[tuple[Fraction, SetExpr]], group: Group) -> Coefficient:
    merged: dict[SetExpr, Fraction] = {}
    for q, expr in terms:
        merged[expr] = merged.get(expr, Fraction(0)) + q
    kept = [(q, e) for e, q in merged.items() if q != 0]
    kept.sort(key=lambda item: show_setexpr(item[1], group))
    return tuple(kept)


@dataclass(frozen=True)
class CPElem:
    """Finite sum of coefficient * unitary terms over a fixed group."""

    group: Group
    terms: tuple[tuple[Elem, Coefficient], ...]  # keyed and sorted by element

    def support(self) -> tuple[Elem, ...]:
        return tuple(t for t, _ in self.terms)

    def coefficient(self, t: Elem) -> Coefficient:
        for u, coeff in self.terms:
            if u == t:
                return coeff
        return ()

    def is_symbolically_zero(self) -> bool:
        return not self.terms


def _build(group: Group, raw: dict[Elem, list[tuple[Fraction, SetExpr]]]) -> CPElem:
    terms = []
    for t in sorted(raw, key=group.sort_key):
        coeff = _canon_coeff(raw[t], group)
        if coeff:
            terms.append((t, coeff))
    return CPElem(group, tuple(terms))


def cp_zero(group: Group) -> CPElem:
    return CPElem(group, ())


def indicator(group: Group, expr: SetExpr) -> CPElem:
    """The diagonal element 1_expr (coefficient at the identity unitary)."""
    return _build(group, {group.identity(): [(Fraction(1), expr)]})


def unitary(group: Group, t: Elem) -> CPElem:
    return _build(group, {t: [(Fraction(1), AllSet())]})


def single(group: Group, q: Fraction, expr: SetExpr, t: Elem) -> CPElem:
    return _build(group, {t: [(q, expr)]})


def cp_add(x: CPElem, y: CPElem) -> CPElem:
    raw: dict[Elem, list[tuple[Fraction, SetExpr]]] = {}
    for t, coeff in x.terms + y.terms:
        raw.setdefault(t, []).extend(coeff)
    return _build(x.group, raw)


def cp_scale(q: Fraction, x: CPElem) -> CPElem:
    raw = {t: [(q * c, e) for c, e in coeff] for t, coeff in x.terms}
    return _build(x.group, raw)


def cp_sub(x: CPElem, y: CPElem) -> CPElem:
    return cp_add(x, cp_scale(Fraction(-1), y))


def _coeff_translate(coeff: Coefficient, t: Elem, group: Group) -> list:
    """The twisted coefficient t.f: indicators move to translated sets."""
    return [(q, translate(t, expr, group)) for q, expr in coeff]


def _coeff_mul(a, b) -> list:
    return [(qa * qb, Intersect(ea, eb)) for qa, ea in a for qb, eb in b]


def cp_mul(x: CPElem, y: CPElem) -> CPElem:
    """(f u_t)(g u_r) = f * (t.g) u_{tr}."""
    group = x.group
    raw: dict[Elem, list[tuple[Fraction, SetExpr]]] = {}
    for t, f in x.terms:
        for r, g in y.terms:
            tr = group.mul(t, r)
            raw.setdefault(tr, []).extend(_coeff_mul(f, _coeff_translate(g, t, group)))
    return _build(group, raw)


def cp_adjoint(x: CPElem) -> CPElem:
    """(f u_t)* = (t^(-1).f) u_{t^(-1)}."""
    group = x.group
    raw: dict[Elem, list[tuple[Fraction, SetExpr]]] = {}
    for t, f in x.terms:
        t_inv = group.inv(t)
        raw.setdefault(t_inv, []).extend(_coeff_translate(f, t_inv, group))
    return _build(group, raw)


def coeff_value(coeff: Coefficient, g: Elem, ctx: SetContext) -> Fraction:
    total = Fraction(0)
    for q, expr in coeff:
        if member_strict(expr, g, ctx):
            total += q
    return total


def cp_vanishes_on(x: CPElem, window: Window, ctx: SetContext | None = None):
    """None when every coefficient evaluates to zero at every window point;
    otherwise the first offending (unitary element, point, value)."""
    if ctx is None:
        ctx = context_for(window)
    for t, coeff in x.terms:
        for g in window.elements:
            val = coeff_value(coeff, g, ctx)
            if val != 0:
                return (t, g, val)
    return None


def show_cp(x: CPElem) -> str:
    group = x.group
    if not x.terms:
        return "0"
    parts = []
    for t, coeff in x.terms:
        for q, expr in coeff:
            parts.append(f"{q}*[{show_setexpr(expr, group)}]u({group.show(t)})")
    return " + ".join(parts)


# ---- proper-infiniteness witnesses -----------------------------------------


@dataclass(frozen=True)
class PIWitness:
    """p = 1_A together with v, w whose five product identities certify that
    p is properly infinite in the symbolic crossed product."""

    group: Group
    set_expr: SetExpr
    v: CPElem
    w: CPElem

    @property
    def p(self) -> CPElem:
        return indicator(self.group, self.set_expr)


def pi_witness(w: ParadoxWitness, group: Group) -> PIWitness:
    """Read the two covering families into the pair v, w: a piece A_j with
    translator t_j contributes 1_{t_j A_j} u_{t_j^(-1)}."""
    vs, ws = [], []
    for j, (piece, t) in enumerate(w.parts):
        term = single(group, Fraction(1), piece, group.inv(t))
        (vs if j < w.split else ws).append(term)
    v = cp_zero(group)
    for term in vs:
        v = cp_add(v, term)
    w_elem = cp_zero(group)
    for term in ws:
        w_elem = cp_add(w_elem, term)
    return PIWitness(group, w.set_expr, v, w_elem)


@dataclass(frozen=True)
class PIReport:
    identities: tuple[tuple[str, bool, str], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.identities)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, msg) for name, ok, msg in self.identities if not ok]


def verify_pi_witness(pw: PIWitness, window: Window,
                      ctx: SetContext | None = None) -> PIReport:
    """Window-exact check of v*v = p = w*w, orthogonality of the ranges, and
    range domination by p."""
    if ctx is None:
        ctx = context_for(window)
    group = pw.group
    p = pw.p
    v, w = pw.v, pw.w
    vv = cp_mul(v, cp_adjoint(v))
    ww = cp_mul(w, cp_adjoint(w))
    identities = (
        ("v*v = p", cp_sub(cp_mul(cp_adjoint(v), v), p)),
        ("w*w = p", cp_sub(cp_mul(cp_adjoint(w), w), p)),
        ("vv* . ww* = 0", cp_mul(vv, ww)),
        ("p . vv* = vv*", cp_sub(cp_mul(p, vv), vv)),
        ("p . ww* = ww*", cp_sub(cp_mul(p, ww), ww)),
    )
    results = []
    for name, delta in identities:
        offender = cp_vanishes_on(delta, window, ctx)
        if offender is None:
            results.append((name, True, ""))
        else:
            t, g, val = offender
            results.append(
                (
                    name,
                    False,
                    f"coefficient of u({group.show(t)}) is {val} at {group.show(g)}",
                )
            )
    return PIReport(tuple(results))


# ---- corner compression -----------------------------------------------------


@dataclass(frozen=True)
class CornerReport:
    compressed: CPElem
    # per off-identity unitary: window support size of its coefficient
    off_diagonal: tuple[tuple[Elem, int], ...]


def corner_compress(a: SetExpr, x: CPElem, window: Window,
                    ctx: SetContext | None = None) -> CornerReport:
    """Compute 1_a * x * 1_a and measure how concentrated every off-identity
    coefficient is on the window."""
    if ctx is None:
        ctx = context_for(window)
    group = x.group
    p = indicator(group, a)
    compressed = cp_mul(cp_mul(p, x), p)
    sizes = []
    for t, coeff in compressed.terms:
        if t == group.identity():
            continue
        support = sum(
            1 for g in window.elements if coeff_value(coeff, g, ctx) != 0
        )
        sizes.append((t, support))
    return CornerReport(compressed, tuple(sizes))
