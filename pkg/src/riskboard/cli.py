"""Command-line client for the risk board.

Runs either against a local data directory (embedding the store) or a remote
service (--url); both modes speak MutationCommands, so a command sequence
produces the same domain outcome in either. Exit codes: 0 success, 2 when a
movement is rejected by the rules, 1 for every other failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Mapping

import httpx

from .domain import RiskLevel, RoamStatus, StrideCategory
from .errors import (
    DomainError,
    NotFoundError,
    RevisionConflictError,
    RiskboardError,
    SchemaError,
)
from .board import board_to_doc
from .knowledge import (
    load_knowledge_base,
    recommend_controls,
    recommend_threats,
)
from .model import model_to_doc, parse_model
from .reporting import generate_report, render_report
from .rules import ruleset_from_doc
from .storage import BoardStore

DEFAULT_DATA_DIR = "riskboard-data"


class LocalClient:
    def __init__(self, data_dir: str, actor: str):
        self.store = BoardStore(Path(data_dir))
        self.actor = actor

    def create_board(self, model_doc, rules_doc, board_id):
        rules = ruleset_from_doc(rules_doc) if rules_doc is not None else None
        bid, revision = self.store.create_board(
            model=model_doc, rules=rules, board_id=board_id, actor=self.actor
        )
        return {"board_id": bid, "revision": revision}

    def list_boards(self):
        return self.store.list_boards()

    def board_doc(self, board_id):
        return board_to_doc(self.store.get_board(board_id))

    def send(self, board_id, command):
        command.setdefault("actor", self.actor)
        return self.store.apply(board_id, command)

    def report_doc(self, board_id):
        board = self.store.get_board(board_id)
        return generate_report(board, kb=self.store.kb).to_doc()

    def report_md(self, board_id):
        board = self.store.get_board(board_id)
        return render_report(generate_report(board, kb=self.store.kb), "md")

    def threats(self, asset_type):
        kb = self.store.kb
        if asset_type is None:
            entries = [kb.threats[t] for t in sorted(kb.threats)]
        else:
            entries = recommend_threats(kb, asset_type)
        return [t.to_doc() for t in entries]

    def controls(self, threat, level):
        required, optional = recommend_controls(self.store.kb, threat, level)
        return {
            "required": [c.to_doc() for c in required],
            "optional": [c.to_doc() for c in optional],
        }

    def extend(self, entry_doc):
        return self.store.extend_kb(entry_doc)


class RemoteClient:
    def __init__(self, base_url: str, actor: str):
        self.http = httpx.Client(base_url=base_url.rstrip("/"), timeout=30.0)
        self.actor = actor

    def _body(self, resp):
        try:
            return resp.json()
        except ValueError:
            return {}

    def _raise(self, resp):
        message = self._body(resp).get("error", resp.text.strip() or f"HTTP {resp.status_code}")
        if resp.status_code == 400:
            raise SchemaError(message)
        if resp.status_code == 404:
            raise NotFoundError(message)
        if resp.status_code == 422:
            raise DomainError(message)
        resp.raise_for_status()

    def _ok(self, resp):
        if resp.status_code not in (200, 201):
            self._raise(resp)
        return self._body(resp)

    def create_board(self, model_doc, rules_doc, board_id):
        body = {"actor": self.actor}
        if model_doc is not None:
            body["model"] = model_doc
        if rules_doc is not None:
            body["rules"] = rules_doc
        if board_id is not None:
            body["board_id"] = board_id
        return self._ok(self.http.post("/v1/boards", json=body))

    def list_boards(self):
        return self._ok(self.http.get("/v1/boards"))["boards"]

    def board_doc(self, board_id):
        return self._ok(self.http.get(f"/v1/boards/{board_id}"))

    def send(self, board_id, command):
        command.setdefault("actor", self.actor)
        resp = self.http.post(
            f"/v1/boards/{board_id}/commands",
            json=command,
            headers={"If-Match": str(command["expected_revision"])},
        )
        if resp.status_code == 409:
            body = self._body(resp)
            raise RevisionConflictError(
                command["expected_revision"], body.get("current_revision", -1)
            )
        return self._ok(resp)

    def report_doc(self, board_id):
        return self._ok(self.http.get(f"/v1/boards/{board_id}/report", params={"format": "json"}))

    def report_md(self, board_id):
        resp = self.http.get(f"/v1/boards/{board_id}/report", params={"format": "md"})
        if resp.status_code != 200:
            self._raise(resp)
        return resp.text

    def threats(self, asset_type):
        params = {} if asset_type is None else {"asset_type": asset_type}
        return self._ok(self.http.get("/v1/knowledge/threats", params=params))["threats"]

    def controls(self, threat, level):
        return self._ok(
            self.http.get(
                "/v1/knowledge/controls",
                params={"threat": threat, "level": level.value},
            )
        )

    def extend(self, entry_doc):
        return self._ok(self.http.post("/v1/knowledge/extensions", json=entry_doc))


# -- resolution helpers ---------------------------------------------------------


def _resolve_board(client, args) -> str:
    if getattr(args, "board", None):
        return args.board
    boards = client.list_boards()
    if len(boards) == 1:
        return boards[0]["board_id"]
    if not boards:
        raise NotFoundError("no boards exist yet; create one with 'board create'")
    ids = ", ".join(b["board_id"] for b in boards)
    raise DomainError(f"several boards exist ({ids}); pick one with --board")


def _resolve_card(board_doc: Mapping, ref: str) -> Mapping:
    cards = board_doc["cards"]
    for key in ("id", "name"):
        exact = [c for c in cards if c[key] == ref]
        if len(exact) == 1:
            return exact[0]
        folded = [c for c in cards if c[key].lower() == ref.lower()]
        if len(folded) == 1:
            return folded[0]
    known = ", ".join(c["id"] for c in cards) or "none"
    raise NotFoundError(f"no card matching {ref!r} (cards: {known})")


def _resolve_risk(card: Mapping, ref: str) -> Mapping:
    risks = card["risks"]
    candidates = (ref, f"{card['id']}:{ref}")
    for wanted in candidates:
        for r in risks:
            if r["id"] == wanted:
                return r
    for wanted in candidates:
        folded = [r for r in risks if r["id"].lower() == wanted.lower()]
        if len(folded) == 1:
            return folded[0]
    by_threat = [r for r in risks if r["threat_id"].lower() == ref.lower()]
    if len(by_threat) == 1:
        return by_threat[0]
    known = ", ".join(r["id"] for r in risks) or "none"
    raise NotFoundError(f"no risk matching {ref!r} on {card['id']!r} (risks: {known})")


def _parse_enum(enum_cls, raw: str, what: str):
    for member in enum_cls:
        if member.value.lower() == raw.lower():
            return member
    if enum_cls is StrideCategory:
        for member in enum_cls:
            if member.display_name.lower() == raw.lower():
                return member
    values = ", ".join(m.value for m in enum_cls)
    raise DomainError(f"unknown {what} {raw!r} (one of: {values})")


def _load_doc_arg(raw: str):
    text = Path(raw[1:]).read_text(encoding="utf-8") if raw.startswith("@") else raw
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def _emit(args, doc, human: str | None = None) -> None:
    if args.json:
        print(json.dumps(doc, indent=2))
    elif human is not None:
        print(human)


# -- command handlers -----------------------------------------------------------


def _cmd_board_create(client, args) -> int:
    model_doc = None
    if args.model:
        model_doc = model_to_doc(parse_model(Path(args.model).read_text(encoding="utf-8")))
    rules_doc = None
    if args.rules:
        rules_doc = json.loads(Path(args.rules).read_text(encoding="utf-8"))
        ruleset_from_doc(rules_doc)  # fail fast with a client-side message
    result = client.create_board(model_doc, rules_doc, args.id)
    _emit(args, result, f"created board {result['board_id']} (revision {result['revision']})")
    return 0


def _cmd_board_show(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    if args.json:
        print(json.dumps(doc, indent=2))
        return 0
    definition = doc["definition"]
    print(f"board {board_id}: {definition['name']} (revision {doc['revision']})")
    for index, column in enumerate(definition["columns"]):
        cards = [c for c in doc["cards"] if c["column_index"] == index]
        print(f"  {column}:")
        for card in cards:
            open_risks = len([r for r in card["risks"] if not r["deferred"]])
            deferred = len(card["risks"]) - open_risks
            suffix = f", {deferred} deferred" if deferred else ""
            mark = " [addressed]" if card["fully_addressed"] else ""
            print(f"    - {card['id']}: {card['name']} ({open_risks} risks{suffix}){mark}")
    return 0


def _cmd_board_list(client, args) -> int:
    boards = client.list_boards()
    _emit(
        args,
        {"boards": boards},
        "\n".join(
            f"{b['board_id']}  revision {b['revision']}  {b['cards']} cards  ({b['name']})"
            for b in boards
        )
        or "no boards",
    )
    return 0


def _cmd_card_import(client, args) -> int:
    board_id = _resolve_board(client, args)
    model_doc = model_to_doc(parse_model(Path(args.model).read_text(encoding="utf-8")))
    revision = client.board_doc(board_id)["revision"]
    result = client.send(
        board_id,
        {"kind": "import_assets", "model": model_doc, "expected_revision": revision},
    )
    _emit(
        args,
        result,
        f"imported {len(model_doc['components'])} components into {board_id} "
        f"(revision {result['revision']})",
    )
    return 0


def _cmd_card_list(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    if args.json:
        print(json.dumps({"cards": doc["cards"]}, indent=2))
        return 0
    columns = doc["definition"]["columns"]
    for card in doc["cards"]:
        scored = len([r for r in card["risks"] if r["score"]])
        print(
            f"{card['id']}  {card['name']}  [{columns[card['column_index']]}]  "
            f"risks: {len(card['risks'])} ({scored} scored)"
        )
    return 0


def _cmd_card_move(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    to = int(args.to) if args.to.isdigit() else args.to
    command = {
        "kind": "move",
        "card_id": card["id"],
        "to": to,
        "approvals": args.approve or [],
        "expected_revision": doc["revision"],
    }
    result = client.send(board_id, command)
    verdict = result["verdict"]
    if verdict["approved"]:
        _emit(
            args,
            result,
            f"moved {card['id']} to {args.to} (revision {result['revision']})",
        )
        return 0
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        print(f"move of {card['id']} rejected:")
        for failure in verdict["failures"]:
            print(f"  - [{failure['rule']}] {failure['justification']}")
    return 2


def _cmd_card_attest(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    result = client.send(
        board_id,
        {
            "kind": "attest_no_threats",
            "card_id": card["id"],
            "note": args.note,
            "expected_revision": doc["revision"],
        },
    )
    _emit(args, result, f"recorded no-threat attestation for {card['id']}")
    return 0


def _cmd_risk_add(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    before = {r["id"] for r in card["risks"]}
    result = client.send(
        board_id,
        {
            "kind": "attach_threats",
            "card_id": card["id"],
            "threat_ids": args.threats,
            "expected_revision": doc["revision"],
        },
    )
    after_card = _resolve_card(client.board_doc(board_id), card["id"])
    new_ids = [r["id"] for r in after_card["risks"] if r["id"] not in before]
    _emit(
        args,
        {**result, "risk_ids": new_ids},
        f"attached {len(new_ids)} threat(s) to {card['id']}: {', '.join(new_ids)}",
    )
    return 0


def _score_inputs(args) -> dict:
    styles = [
        args.factors is not None,
        any(g is not None for g in (args.ta, args.vu, args.ti, args.bi)),
        args.likelihood is not None or args.impact is not None,
    ]
    if sum(styles) != 1:
        raise DomainError(
            "choose one scoring style: --factors, the four factor groups, "
            "or --likelihood with --impact"
        )
    if args.factors is not None:
        return {"factors": _load_doc_arg(args.factors)}
    if styles[1]:
        groups = {
            "threat_agent": args.ta,
            "vulnerability": args.vu,
            "technical_impact": args.ti,
            "business_impact": args.bi,
        }
        missing = [k for k, v in groups.items() if v is None]
        if missing:
            raise DomainError(f"missing factor group(s): {', '.join(missing)}")
        return {"factors": groups}
    if args.likelihood is None or args.impact is None:
        raise DomainError("direct scoring needs both --likelihood and --impact")
    return {"likelihood": args.likelihood, "impact": args.impact}


def _cmd_risk_score(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    risk = _resolve_risk(card, args.risk)
    command = {
        "kind": "score_risk",
        "card_id": card["id"],
        "risk_id": risk["id"],
        "expected_revision": doc["revision"],
        **_score_inputs(args),
    }
    result = client.send(board_id, command)
    after = _resolve_risk(_resolve_card(client.board_doc(board_id), card["id"]), risk["id"])
    score = after["score"]
    _emit(
        args,
        {**result, "risk_id": risk["id"], "score": score},
        f"scored {risk['id']}: likelihood {score['likelihood']}, impact "
        f"{score['impact']}, CRI {score['cri']} ({score['level']})",
    )
    return 0


def _cmd_risk_score_category(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    category = _parse_enum(StrideCategory, args.category, "STRIDE category")
    before_unscored = {r["id"] for r in card["risks"] if not r["score"]}
    result = client.send(
        board_id,
        {
            "kind": "apply_category_score",
            "card_id": card["id"],
            "category": category.value,
            "likelihood": args.likelihood,
            "impact": args.impact,
            "expected_revision": doc["revision"],
        },
    )
    after_card = _resolve_card(client.board_doc(board_id), card["id"])
    affected = [
        r["id"] for r in after_card["risks"] if r["id"] in before_unscored and r["score"]
    ]
    _emit(
        args,
        {**result, "risk_ids": affected},
        f"scored {len(affected)} {category.value} risk(s) on {card['id']}"
        + (f": {', '.join(affected)}" if affected else ""),
    )
    return 0


def _cmd_risk_defer(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    risk = _resolve_risk(card, args.risk)
    deferred = not args.clear
    result = client.send(
        board_id,
        {
            "kind": "mark_deferred",
            "card_id": card["id"],
            "risk_id": risk["id"],
            "deferred": deferred,
            "expected_revision": doc["revision"],
        },
    )
    verb = "deferred" if deferred else "surfaced"
    _emit(args, result, f"{verb} {risk['id']}")
    return 0


def _cmd_risk_roam(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    risk = _resolve_risk(card, args.risk)
    status = _parse_enum(RoamStatus, args.status, "ROAM status")
    command = {
        "kind": "set_roam",
        "card_id": card["id"],
        "risk_id": risk["id"],
        "status": status.value,
        "expected_revision": doc["revision"],
    }
    if args.owner is not None:
        command["owner"] = args.owner
    result = client.send(board_id, command)
    if status is RoamStatus.RESOLVED:
        human = f"resolved {risk['id']}; its analysis is eliminated from the card"
    else:
        human = f"set {risk['id']} to {status.value}"
    _emit(args, result, human)
    return 0


def _cmd_control_add(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    risk = _resolve_risk(card, args.risk)
    result = client.send(
        board_id,
        {
            "kind": "attach_controls",
            "card_id": card["id"],
            "risk_id": risk["id"],
            "control_ids": args.controls,
            "expected_revision": doc["revision"],
        },
    )
    _emit(args, result, f"attached control(s) to {risk['id']}: {', '.join(args.controls)}")
    return 0


def _cmd_control_suggest(client, args) -> int:
    board_id = _resolve_board(client, args)
    doc = client.board_doc(board_id)
    card = _resolve_card(doc, args.card)
    risk = _resolve_risk(card, args.risk)
    if not risk["score"]:
        raise DomainError(f"risk {risk['id']!r} is not scored yet; score it first")
    level = RiskLevel(risk["score"]["level"])
    result = client.controls(risk["threat_id"], level)
    if args.json:
        print(json.dumps(result, indent=2))
        return 0
    print(f"{risk['id']} ({risk['threat_id']}, level {level.value})")
    print("required:")
    for c in result["required"] or []:
        print(f"  - {c['id']}: {c['title']}")
    if not result["required"]:
        print("  (none at this level)")
    print("optional:")
    for c in result["optional"]:
        print(f"  - {c['id']}: {c['title']}")
    return 0


def _cmd_kb_validate(client, args) -> int:
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
    else:
        text = resources.files("riskboard.data").joinpath("knowledge.json").read_text()
    kb = load_knowledge_base(text)
    doc = {
        "threats": len(kb.threats),
        "controls": len(kb.controls),
        "mappings": len(kb.mappings),
        "asset_types": sorted(kb.asset_types),
    }
    _emit(
        args,
        doc,
        f"knowledge base OK: {doc['threats']} threats, {doc['controls']} controls, "
        f"{doc['mappings']} mappings",
    )
    return 0


def _cmd_kb_extend(client, args) -> int:
    doc = _load_doc_arg(f"@{args.file}")
    entries = doc if isinstance(doc, list) else [doc]
    results = [client.extend(entry) for entry in entries]
    _emit(
        args,
        {"added": results},
        "\n".join(f"added {r['kind']} {r['id']}" for r in results),
    )
    return 0


def _cmd_kb_threats(client, args) -> int:
    threats = client.threats(args.asset_type)
    _emit(
        args,
        {"threats": threats},
        "\n".join(f"{t['id']}  [{t['stride']}]  {t['title']}" for t in threats)
        or "no threats",
    )
    return 0


def _cmd_kb_controls(client, args) -> int:
    level = _parse_enum(RiskLevel, args.level, "risk level")
    result = client.controls(args.threat, level)
    if args.json:
        print(json.dumps(result, indent=2))
        return 0
    print("required:")
    for c in result["required"]:
        print(f"  - {c['id']}: {c['title']}")
    if not result["required"]:
        print("  (none at this level)")
    print("optional:")
    for c in result["optional"]:
        print(f"  - {c['id']}: {c['title']}")
    return 0


def _cmd_report(client, args) -> int:
    board_id = _resolve_board(client, args)
    if args.format == "json":
        doc = client.report_doc(board_id)
        print(json.dumps(doc, indent=2))
    else:
        print(client.report_md(board_id), end="")
    return 0


# -- parser ----------------------------------------------------------------------


def _add_board_flag(parser) -> None:
    parser.add_argument("--board", help="board id (optional when only one exists)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskboard", description="Agile risk management board"
    )
    parser.add_argument("--data-dir", help=f"local data directory (default {DEFAULT_DATA_DIR})")
    parser.add_argument("--url", help="remote service base URL instead of local storage")
    parser.add_argument("--actor", default="cli", help="identity recorded on events")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="group", required=True)

    board = sub.add_parser("board", help="board lifecycle").add_subparsers(
        dest="cmd", required=True
    )
    p = board.add_parser("create", help="create a board, optionally importing a model")
    p.add_argument("--model", help="architecture model file (JSON or YAML)")
    p.add_argument("--rules", help="rule-set JSON file (defaults to the stock rules)")
    p.add_argument("--id", help="explicit board id")
    p.set_defaults(handler=_cmd_board_create)
    p = board.add_parser("show", help="print a board")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_board_show)
    p = board.add_parser("list", help="list boards")
    p.set_defaults(handler=_cmd_board_list)

    card = sub.add_parser("card", help="asset cards").add_subparsers(
        dest="cmd", required=True
    )
    p = card.add_parser("import", help="import model components as cards")
    p.add_argument("--model", required=True)
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_card_import)
    p = card.add_parser("list", help="list cards")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_card_list)
    p = card.add_parser("move", help="move a card to another column")
    p.add_argument("card")
    p.add_argument("--to", required=True, help="target column name or index")
    p.add_argument("--approve", action="append", help="approval identity (repeatable)")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_card_move)
    p = card.add_parser("attest", help="record a no-threat attestation")
    p.add_argument("card")
    p.add_argument("--note", required=True)
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_card_attest)

    risk = sub.add_parser("risk", help="risk assessment").add_subparsers(
        dest="cmd", required=True
    )
    p = risk.add_parser("add", help="attach catalog threats to a card")
    p.add_argument("card")
    p.add_argument("threats", nargs="+", metavar="threat")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_risk_add)
    p = risk.add_parser("score", help="score one risk")
    p.add_argument("card")
    p.add_argument("risk")
    p.add_argument("--factors", help="full factor-set JSON (inline or @file)")
    p.add_argument("--ta", "--threat-agent", dest="ta", nargs=4, type=float,
                   metavar="F", help="threat-agent factors")
    p.add_argument("--vu", "--vulnerability", dest="vu", nargs=4, type=float,
                   metavar="F", help="vulnerability factors")
    p.add_argument("--ti", "--technical-impact", dest="ti", nargs=4, type=float,
                   metavar="F", help="technical-impact factors")
    p.add_argument("--bi", "--business-impact", dest="bi", nargs=4, type=float,
                   metavar="F", help="business-impact factors")
    p.add_argument("--likelihood", type=int, help="direct likelihood band 1-5")
    p.add_argument("--impact", type=int, help="direct impact band 1-5")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_risk_score)
    p = risk.add_parser("score-category", help="score all unscored risks of a STRIDE category")
    p.add_argument("card")
    p.add_argument("category")
    p.add_argument("--likelihood", type=int, required=True)
    p.add_argument("--impact", type=int, required=True)
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_risk_score_category)
    p = risk.add_parser("defer", help="defer a risk (or surface it with --clear)")
    p.add_argument("card")
    p.add_argument("risk")
    p.add_argument("--clear", action="store_true")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_risk_defer)
    p = risk.add_parser("roam", help="set a risk's ROAM status")
    p.add_argument("card")
    p.add_argument("risk")
    p.add_argument("status")
    p.add_argument("--owner")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_risk_roam)

    control = sub.add_parser("control", help="security controls").add_subparsers(
        dest="cmd", required=True
    )
    p = control.add_parser("add", help="attach controls to a risk")
    p.add_argument("card")
    p.add_argument("risk")
    p.add_argument("controls", nargs="+", metavar="control")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_control_add)
    p = control.add_parser("suggest", help="recommend controls for a scored risk")
    p.add_argument("card")
    p.add_argument("risk")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_control_suggest)

    kb = sub.add_parser("kb", help="knowledge base").add_subparsers(
        dest="cmd", required=True
    )
    p = kb.add_parser("validate", help="validate a knowledge-base file")
    p.add_argument("file", nargs="?")
    p.set_defaults(handler=_cmd_kb_validate)
    p = kb.add_parser("extend", help="add catalog entries from a file")
    p.add_argument("--file", required=True)
    p.set_defaults(handler=_cmd_kb_extend)
    p = kb.add_parser("threats", help="list threats, optionally for an asset type")
    p.add_argument("--asset-type")
    p.set_defaults(handler=_cmd_kb_threats)
    p = kb.add_parser("controls", help="recommend controls for a threat at a level")
    p.add_argument("--threat", required=True)
    p.add_argument("--level", required=True)
    p.set_defaults(handler=_cmd_kb_controls)

    p = sub.add_parser("report", help="generate the risk-assessment report")
    p.add_argument("--format", choices=("json", "md"), default="md")
    _add_board_flag(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def _make_client(args):
    if args.url and args.data_dir:
        raise DomainError("--url and --data-dir are mutually exclusive")
    if args.url:
        return RemoteClient(args.url, args.actor)
    import os

    data_dir = args.data_dir or os.environ.get("RISKBOARD_DATA_DIR") or DEFAULT_DATA_DIR
    return LocalClient(data_dir, args.actor)


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for rule rejections.
        return 0 if exc.code in (0, None) else 1
    try:
        client = _make_client(args)
        return args.handler(client, args)
    except RevisionConflictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RiskboardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run_cli())
