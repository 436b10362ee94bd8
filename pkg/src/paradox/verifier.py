"""Independent certificate verifier: pure replay of the recorded facts using
only the data model and group arithmetic.  No matching or flow solver is
imported here, so a verifier pass is evidence independent of the producer."""

from __future__ import annotations

from dataclasses import dataclass

from .certificates import (
    SCHEMA,
    content_digest,
    pi_witness_from_cert,
    window_digest,
    window_from_descriptor,
    witness_from_cert,
)
from .crossed import verify_pi_witness
from .groups import group_from_string
from .sets import BUDGET_EXCEEDED, SetContext, materialize, member, parse_setexpr
from .witness import witness_check


class CertificateFormatError(ValueError):
    """The file is not a readable certificate of a known schema."""


@dataclass(frozen=True)
class VerifyOutcome:
    ok: bool
    message: str

    @staticmethod
    def passed() -> "VerifyOutcome":
        return VerifyOutcome(True, "all facts re-check")

    @staticmethod
    def failed(message: str) -> "VerifyOutcome":
        return VerifyOutcome(False, message)


def verify_certificate(cert: dict) -> VerifyOutcome:
    """Re-check every semantic fact of a certificate; the first violated fact
    is named in the outcome message."""
    if not isinstance(cert, dict) or cert.get("schema") != SCHEMA:
        raise CertificateFormatError(f"unknown schema {cert.get('schema')!r}")
    kind = cert.get("kind")
    checkers = {
        "match": _verify_match,
        "deficiency": _verify_deficiency,
        "witness": _verify_witness,
        "flow": _verify_flow,
        "flow-deficiency": _verify_flow_deficiency,
        "cp-witness": _verify_cp_witness,
    }
    if kind not in checkers:
        raise CertificateFormatError(f"unknown certificate kind {kind!r}")
    try:
        group = group_from_string(cert["group"])
        window = window_from_descriptor(group, cert["window"])
        slack = int(cert.get("budgetSlack", 4))
    except (KeyError, ValueError, TypeError) as exc:
        raise CertificateFormatError(f"malformed certificate envelope: {exc}") from exc

    if window_digest(window) != cert.get("checkedOn"):
        return VerifyOutcome.failed("window digest does not match checkedOn")
    ctx = SetContext(group, window.radius + slack)
    try:
        outcome = checkers[kind](cert, group, window, ctx)
    except (KeyError, ValueError, TypeError) as exc:
        return VerifyOutcome.failed(f"payload does not parse or replay: {exc}")
    if not outcome.ok:
        return outcome
    if content_digest(cert) != cert.get("digest"):
        return VerifyOutcome.failed("content digest mismatch")
    return outcome


def _window_slice(cert: dict, group, window, ctx):
    expr = parse_setexpr(cert["set"], group)
    mat = materialize(expr, window, ctx)
    if not mat.complete:
        return expr, None
    return expr, list(mat.elements)


def _verify_match(cert: dict, group, window, ctx) -> VerifyOutcome:
    expr, points = _window_slice(cert, group, window, ctx)
    if points is None:
        return VerifyOutcome.failed("window memberships undecided at this budget")
    translators = {group.parse(t) for t in cert["translators"]}
    assignment = [
        (group.parse(x), group.parse(s1), group.parse(s2))
        for x, s1, s2 in cert["assignment"]
    ]
    assigned = [x for x, _, _ in assignment]
    if sorted(map(group.sort_key, assigned)) != sorted(map(group.sort_key, points)):
        return VerifyOutcome.failed(
            "assignment domain differs from the set's window slice"
        )
    if len(set(assigned)) != len(assigned):
        return VerifyOutcome.failed("assignment lists a point twice")
    images = set()
    for x, s1, s2 in assignment:
        for s in (s1, s2):
            if s not in translators:
                return VerifyOutcome.failed(
                    f"translator {group.show(s)} for {group.show(x)} is not declared"
                )
            img = group.mul(s, x)
            if member(expr, img, ctx) is not True:
                return VerifyOutcome.failed(
                    f"image {group.show(img)} of {group.show(x)} leaves the set"
                )
            if img in images:
                return VerifyOutcome.failed(
                    f"image collision at {group.show(img)} (from {group.show(x)})"
                )
            images.add(img)
    return VerifyOutcome.passed()


def _verify_deficiency(cert: dict, group, window, ctx) -> VerifyOutcome:
    expr, points = _window_slice(cert, group, window, ctx)
    if points is None:
        return VerifyOutcome.failed("window memberships undecided at this budget")
    point_set = set(points)
    violator = [group.parse(x) for x in cert["violator"]]
    if not violator:
        return VerifyOutcome.failed("empty violator certifies nothing")
    if len(set(violator)) != len(violator):
        return VerifyOutcome.failed("violator lists a point twice")
    for x in violator:
        if x not in point_set:
            return VerifyOutcome.failed(
                f"violator point {group.show(x)} is outside the window slice"
            )
    translators = [group.parse(t) for t in cert["translators"]]
    targets = set()
    for x in violator:
        for s in translators:
            img = group.mul(s, x)
            res = member(expr, img, ctx)
            if res is BUDGET_EXCEEDED:
                return VerifyOutcome.failed(
                    f"membership of {group.show(img)} undecided at this budget"
                )
            if res:
                targets.add(img)
    if not len(targets) < 2 * len(violator):
        return VerifyOutcome.failed(
            f"|targets| = {len(targets)} is not below 2|D| = {2 * len(violator)}"
        )
    return VerifyOutcome.passed()


def _verify_witness(cert: dict, group, window, ctx) -> VerifyOutcome:
    w = witness_from_cert(cert, group)
    report = witness_check(w, window, ctx)
    if not report.passed:
        name, msg = report.failures()[0]
        return VerifyOutcome.failed(f"{name}: {msg}")
    return VerifyOutcome.passed()


def _verify_flow(cert: dict, group, window, ctx) -> VerifyOutcome:
    set_a = parse_setexpr(cert["setA"], group)
    set_b = parse_setexpr(cert["setB"], group)
    copies, capacity = int(cert["copies"]), int(cert["capacity"])
    mat = materialize(set_a, window, ctx)
    if not mat.complete:
        return VerifyOutcome.failed("window memberships undecided at this budget")
    points = list(mat.elements)
    translators = {group.parse(t) for t in cert["translators"]}
    assignment = [
        (group.parse(x), [group.parse(s) for s in used])
        for x, used in cert["assignment"]
    ]
    assigned = [x for x, _ in assignment]
    if sorted(map(group.sort_key, assigned)) != sorted(map(group.sort_key, points)):
        return VerifyOutcome.failed(
            "assignment domain differs from the set's window slice"
        )
    if len(set(assigned)) != len(assigned):
        return VerifyOutcome.failed("assignment lists a point twice")
    arrivals: dict = {}
    for x, used in assignment:
        if len(used) != copies:
            return VerifyOutcome.failed(
                f"{group.show(x)} sends {len(used)} copies, expected {copies}"
            )
        for s in used:
            if s not in translators:
                return VerifyOutcome.failed(
                    f"translator {group.show(s)} is not declared"
                )
            img = group.mul(s, x)
            if member(set_b, img, ctx) is not True:
                return VerifyOutcome.failed(
                    f"image {group.show(img)} leaves the target set"
                )
            arrivals[img] = arrivals.get(img, 0) + 1
            if arrivals[img] > capacity:
                return VerifyOutcome.failed(
                    f"target {group.show(img)} exceeds capacity {capacity}"
                )
    return VerifyOutcome.passed()


def _verify_flow_deficiency(cert: dict, group, window, ctx) -> VerifyOutcome:
    set_a = parse_setexpr(cert["setA"], group)
    set_b = parse_setexpr(cert["setB"], group)
    copies, capacity = int(cert["copies"]), int(cert["capacity"])
    mat = materialize(set_a, window, ctx)
    if not mat.complete:
        return VerifyOutcome.failed("window memberships undecided at this budget")
    point_set = set(mat.elements)
    violator = [group.parse(x) for x in cert["violator"]]
    if not violator:
        return VerifyOutcome.failed("empty violator certifies nothing")
    if len(set(violator)) != len(violator):
        return VerifyOutcome.failed("violator lists a point twice")
    for x in violator:
        if x not in point_set:
            return VerifyOutcome.failed(
                f"violator point {group.show(x)} is outside the window slice"
            )
    translators = [group.parse(t) for t in cert["translators"]]
    targets = set()
    for x in violator:
        for s in translators:
            img = group.mul(s, x)
            res = member(set_b, img, ctx)
            if res is BUDGET_EXCEEDED:
                return VerifyOutcome.failed(
                    f"membership of {group.show(img)} undecided at this budget"
                )
            if res:
                targets.add(img)
    if not copies * len(violator) > capacity * len(targets):
        return VerifyOutcome.failed(
            f"m|D| = {copies * len(violator)} does not exceed "
            f"n|targets| = {capacity * len(targets)}"
        )
    return VerifyOutcome.passed()


def _verify_cp_witness(cert: dict, group, window, ctx) -> VerifyOutcome:
    pw = pi_witness_from_cert(cert, group)
    report = verify_pi_witness(pw, window, ctx)
    if not report.passed:
        name, msg = report.failures()[0]
        return VerifyOutcome.failed(f"{name}: {msg}")
    return VerifyOutcome.passed()
