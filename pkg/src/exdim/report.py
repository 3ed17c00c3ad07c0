"""Structured reports with deterministic text and json renderings.

The json form is the machine format.  Its schema::

    {
      "command": str,
      "inputs": [str, ...],
      "sections": [{"title": str, "lines": [str, ...], "data": {...}}, ...],
      "verdicts": [{"name": str, "status": "pass"|"FAIL"|"inconclusive",
                    "detail": str, "inputs": [str, ...]}, ...],
      "notes": [str, ...],
      "ok": bool
    }

``data`` holds only strings, numbers, booleans, lists and dicts, so a
report survives ``from_json(to_json(r))`` unchanged.
"""

import json

PASS, FAIL, OPEN = "pass", "FAIL", "inconclusive"


def status_of(ok):
    return PASS if ok is True else (OPEN if ok is None else FAIL)


class Report:
    def __init__(self, command, inputs=()):
        self.command = command
        self.inputs = [str(x) for x in inputs]
        self.sections = []
        self.verdicts = []
        self.notes = []

    def section(self, title):
        s = {"title": title, "lines": [], "data": {}}
        self.sections.append(s)
        return s

    def verdict(self, name, ok, detail="", inputs=None):
        v = {"name": name, "status": status_of(ok), "detail": detail,
             "inputs": list(inputs if inputs is not None else self.inputs)}
        self.verdicts.append(v)
        return v

    def absorb(self, audit, inputs=None):
        """Copy the checks of an AuditReport in as verdicts."""
        for c in audit.checks:
            self.verdict(c.name, c.ok, c.detail, inputs)
        self.notes.extend(audit.notes)

    @property
    def ok(self):
        return all(v["status"] != FAIL for v in self.verdicts)

    def first_failure(self):
        for v in self.verdicts:
            if v["status"] == FAIL:
                return v
        return None

    def to_dict(self):
        return {"command": self.command, "inputs": self.inputs, "sections": self.sections,
                "verdicts": self.verdicts, "notes": self.notes, "ok": self.ok}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        r = cls(d["command"], d["inputs"])
        r.sections = d["sections"]
        r.verdicts = d["verdicts"]
        r.notes = d["notes"]
        return r

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_text(self):
        out = [f"exdim {self.command}: {' '.join(self.inputs)}".rstrip()]
        for s in self.sections:
            out.append("")
            out.append(f"== {s['title']} ==")
            out.extend(s["lines"])
        if self.verdicts:
            out.append("")
            out.append("verdicts:")
            width = max(len(v["status"]) for v in self.verdicts)
            for v in self.verdicts:
                line = f"  {v['status']:<{width}}  {v['name']}"
                if v["detail"]:
                    line += f"  [{v['detail']}]"
                out.append(line)
        if self.notes:
            out.append("")
            out.append("notes:")
            out.extend(f"  {n}" for n in self.notes)
        out.append("")
        out.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(out) + "\n"

    def render(self, fmt):
        return self.to_json() if fmt == "json" else self.to_text()


def fmt_dim(v):
    return str(v)


def fmt_set(labels):
    return "{" + ", ".join(labels) + "}"


def dim_data(v, certificate=None):
    d = {"value": str(v)}
    if v.is_infinite:
        d["cycle"] = [ind.label for ind in v.cycle]
    if certificate is not None:
        d["certificate"] = [str(c) for c in certificate.chain]
        if certificate.beyond_cap:
            d["beyond_cap"] = list(certificate.beyond_cap)
    return d


def dim_lines(name, v, certificate=None):
    lines = [f"{name} = {v}"]
    if v.is_infinite:
        lines.append(f"  cycle {fmt_set(ind.label for ind in v.cycle)}")
    if certificate is not None:
        for i, c in enumerate(certificate.chain, 1):
            tag = "  (sum of table rows beyond cap)" if (i - 1) in certificate.beyond_cap else ""
            lines.append(f"  step {i}: {c}{tag}")
    return lines
