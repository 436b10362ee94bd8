"""Self-contained JSON certificates: deterministic serialisation, content
digests, and window descriptors.  A certificate carries everything an
independent verifier needs to replay its facts exactly."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .crossed import CPElem, PIWitness
from .engine import DeficiencyCert, FlowCert, FlowDeficiency, MatchCert
from .groups import Group, Window, ball, explicit_window
from .sets import parse_setexpr, show_setexpr
from .witness import ParadoxWitness

SCHEMA = "paradox-cert/v1"
PRODUCER = "paradox 0.1.0"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def window_digest(window: Window) -> str:
    group = window.group
    payload = f"r{window.radius}\n" + "\n".join(
        group.show(g) for g in window.elements
    )
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


def window_descriptor(window: Window) -> dict:
    if window.kind == "ball":
        return {"radius": window.radius}
    return {
        "radius": window.radius,
        "elements": [window.group.show(g) for g in window.elements],
    }


def window_from_descriptor(group: Group, desc: dict) -> Window:
    if "elements" in desc:
        elems = tuple(group.parse(t) for t in desc["elements"])
        return explicit_window(group, elems, int(desc["radius"]))
    return ball(group, int(desc["radius"]))


def content_digest(cert: dict) -> str:
    semantic = {k: v for k, v in cert.items() if k not in ("digest", "producer")}
    return "sha256:" + hashlib.sha256(
        canonical_json(semantic).encode("utf-8")
    ).hexdigest()


def _finish(cert: dict) -> dict:
    cert["producer"] = PRODUCER
    cert["digest"] = content_digest(cert)
    return cert


def _base(kind: str, group: Group, window: Window, slack: int) -> dict:
    return {
        "schema": SCHEMA,
        "kind": kind,
        "group": group.key,
        "window": window_descriptor(window),
        "checkedOn": window_digest(window),
        "budgetSlack": slack,
    }


def cert_from_match(cert: MatchCert, slack: int = 4) -> dict:
    group = cert.group
    out = _base("match", group, cert.window, slack)
    out["set"] = show_setexpr(cert.set_expr, group)
    out["translators"] = [group.show(s) for s in cert.translators]
    out["assignment"] = [
        [group.show(x), group.show(s1), group.show(s2)]
        for x, s1, s2 in cert.assignment
    ]
    return _finish(out)


def cert_from_deficiency(cert: DeficiencyCert, slack: int = 4) -> dict:
    group = cert.group
    out = _base("deficiency", group, cert.window, slack)
    out["set"] = show_setexpr(cert.set_expr, group)
    out["translators"] = [group.show(s) for s in cert.translators]
    out["violator"] = [group.show(x) for x in cert.violator]
    return _finish(out)


def cert_from_witness(w: ParadoxWitness, group: Group, window: Window,
                      slack: int = 4) -> dict:
    out = _base("witness", group, window, slack)
    out["set"] = show_setexpr(w.set_expr, group)
    out["parts"] = [
        {"piece": show_setexpr(piece, group), "translator": group.show(t)}
        for piece, t in w.parts
    ]
    out["split"] = w.split
    return _finish(out)


def witness_from_cert(data: dict, group: Group) -> ParadoxWitness:
    parts = tuple(
        (parse_setexpr(item["piece"], group), group.parse(item["translator"]))
        for item in data["parts"]
    )
    return ParadoxWitness(parse_setexpr(data["set"], group), parts, int(data["split"]))


def cert_from_flow(cert: FlowCert, slack: int = 4) -> dict:
    group = cert.group
    out = _base("flow", group, cert.window, slack)
    out["copies"] = cert.copies
    out["capacity"] = cert.capacity
    out["setA"] = show_setexpr(cert.set_a, group)
    out["setB"] = show_setexpr(cert.set_b, group)
    out["translators"] = [group.show(s) for s in cert.translators]
    out["assignment"] = [
        [group.show(x), [group.show(s) for s in used]]
        for x, used in cert.assignment
    ]
    return _finish(out)


def cert_from_flow_deficiency(cert: FlowDeficiency, slack: int = 4) -> dict:
    group = cert.group
    out = _base("flow-deficiency", group, cert.window, slack)
    out["copies"] = cert.copies
    out["capacity"] = cert.capacity
    out["setA"] = show_setexpr(cert.set_a, group)
    out["setB"] = show_setexpr(cert.set_b, group)
    out["translators"] = [group.show(s) for s in cert.translators]
    out["violator"] = [group.show(x) for x in cert.violator]
    return _finish(out)


def _cp_to_json(x: CPElem) -> list:
    group = x.group
    return [
        [group.show(t), [[str(q), show_setexpr(e, group)] for q, e in coeff]]
        for t, coeff in x.terms
    ]


def cp_from_json(data: list, group: Group) -> CPElem:
    terms = []
    for t_text, coeff in data:
        parsed = tuple(
            (Fraction(q_text), parse_setexpr(e_text, group)) for q_text, e_text in coeff
        )
        terms.append((group.parse(t_text), parsed))
    return CPElem(group, tuple(terms))


def cert_from_pi_witness(pw: PIWitness, window: Window, slack: int = 4) -> dict:
    group = pw.group
    out = _base("cp-witness", group, window, slack)
    out["set"] = show_setexpr(pw.set_expr, group)
    out["v"] = _cp_to_json(pw.v)
    out["w"] = _cp_to_json(pw.w)
    return _finish(out)


def pi_witness_from_cert(data: dict, group: Group) -> PIWitness:
    return PIWitness(
        group,
        parse_setexpr(data["set"], group),
        cp_from_json(data["v"], group),
        cp_from_json(data["w"], group),
    )


def write_certificate(cert: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(cert))
        fh.write("\n")


def load_certificate(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
