"""Report assembly and emission (text, JSON, CSV).

The JSON layout is documented in ``docs/report-schema.md``.  Everything
except ``generated_at`` is a deterministic function of the scenario and the
flags.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .suites import CANDIDATE, CONSISTENT, FAIL, PASS, SKIP, UNRESOLVED, Check

SCHEMA = "genkoszul-report/1"
VERDICTS = (PASS, FAIL, UNRESOLVED, SKIP, CONSISTENT, CANDIDATE)

EXIT_OK, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_USAGE = 0, 1, 2, 3


@dataclass
class Report:
    scenario: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out = {v: 0 for v in VERDICTS}
        for c in self.checks:
            out[c.verdict] = out.get(c.verdict, 0) + 1
        return out

    @property
    def exit_status(self) -> int:
        verdicts = {c.verdict for c in self.checks}
        if FAIL in verdicts:
            return EXIT_FAIL
        if UNRESOLVED in verdicts:
            return EXIT_UNRESOLVED
        return EXIT_OK

    def as_dict(self, timestamp: str | None = None) -> dict:
        return {
            "schema": SCHEMA,
            "generated_at": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "scenario": self.scenario,
            "run": self.run,
            "summary": {"counts": self.counts(), "exit_status": self.exit_status},
            "checks": [c.as_dict() for c in self.checks],
        }


def _value(side: dict):
    if not side:
        return ""
    if "value" in side:
        v = side["value"]
        return "?" if v is None else v
    return json.dumps(side, sort_keys=True)


def render_text(report: Report) -> str:
    lines = []
    sc = report.scenario
    if sc:
        lines.append(f"scenario {sc.get('name')}  field {sc.get('field')}  ranks {sc.get('ranks')}")
        g = sc.get("grades", {})
        if g:
            lines.append(f"grades g = {g['g']['value']} ({g['g']['source']}), h = {g['h']['value']} ({g['h']['source']})")
    for c in report.checks:
        if c.relation in ("==", "<="):
            body = f"{c.lhs.get('expr')} = {_value(c.lhs)} {c.relation} {c.rhs.get('expr')} = {_value(c.rhs)}"
        elif c.relation == "same-hilbert-function":
            body = f"{c.lhs['expr']} {c.lhs['hilbert']} vs {c.rhs['expr']} {c.rhs['hilbert']}"
        elif c.relation == "finite-length":
            body = f"{c.lhs['expr']} = {_value(c.lhs)}"
        elif c.relation == "probe":
            body = f"lengths {c.lhs.get('lengths')}"
        else:
            body = c.anchor
        status = f" [{','.join(c.statuses)}]" if c.statuses else ""
        note = f"  ({c.note})" if c.note and c.verdict in (SKIP, FAIL, UNRESOLVED) else ""
        lines.append(f"{c.verdict:<10} {c.id}: {body}{status}{note}")
    counts = {k: v for k, v in report.counts().items() if v}
    lines.append("summary " + " ".join(f"{k}={v}" for k, v in counts.items()) + f"  exit={report.exit_status}")
    return "\n".join(lines) + "\n"


CSV_FIELDS = ("id", "suite", "verdict", "relation", "lhs_expr", "lhs_value", "rhs_expr", "rhs_value",
              "termination", "anchor", "note")


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in report.checks:
        w.writerow([c.id, c.suite, c.verdict, c.relation, c.lhs.get("expr", ""), _value(c.lhs),
                    c.rhs.get("expr", ""), _value(c.rhs), ";".join(c.statuses), c.anchor, c.note])
    return buf.getvalue()


def render_json(report: Report, timestamp: str | None = None) -> str:
    return json.dumps(report.as_dict(timestamp), indent=2, ensure_ascii=False) + "\n"


def emit_report(report: Report, fmt: str = "text", path: str | None = None) -> None:
    """Write the report; ``path=None`` or ``"-"`` means stdout.  Raises ``OSError`` on IO failure."""
    if fmt == "json":
        out = render_json(report)
    elif fmt == "csv":
        out = render_csv(report)
    elif fmt == "text":
        out = render_text(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None or path == "-":
        sys.stdout.write(out)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(out)
