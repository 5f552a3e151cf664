"""Pass/fail bookkeeping shared by every checker."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"
MAX_WITNESSES = 5


def _render(x):
    if isinstance(x, (list, tuple)):
        return [_render(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _render(v) for k, v in x.items()}
    if isinstance(x, (int, bool)) or x is None:
        return x
    return str(x)


@dataclass
class Witness:
    inputs: tuple
    residual: object
    detail: str = ""

    def as_dict(self):
        out = {"inputs": _render(list(self.inputs)), "residual": _render(self.residual)}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Check:
    """One named identity evaluated on many instances."""

    name: str
    instances: int = 0
    failures: int = 0
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    forced: str | None = None

    def record(self, inputs, residual, detail: str = "") -> bool:
        """Count one instance; a nonzero residual is a failure.  Returns True on success."""
        self.instances += 1
        if residual:
            self.failures += 1
            if len(self.witnesses) < MAX_WITNESSES:
                self.witnesses.append(Witness(tuple(inputs), residual, detail))
            return False
        return True

    def fail(self, inputs, residual, detail: str = ""):
        self.instances += 1
        self.failures += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(Witness(tuple(inputs), residual, detail))

    def note(self, text: str):
        self.notes.append(text)

    @property
    def status(self) -> str:
        if self.forced:
            return self.forced
        if self.failures:
            return FAIL
        if not self.instances:
            return VACUOUS
        return PASS

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None

    def as_dict(self):
        out = {
            "name": self.name,
            "status": self.status,
            "instances": self.instances,
            "failures": self.failures,
            "witnesses": [w.as_dict() for w in self.witnesses],
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def text(self) -> str:
        lines = [f"[{self.status.upper():7}] {self.name} ({self.instances} instances)"]
        for note in self.notes:
            lines.append(f"          note: {note}")
        for w in self.witnesses:
            args = ", ".join(str(a) for a in w.inputs)
            lines.append(f"          witness ({args}) -> residual {w.residual}")
            if w.detail:
                lines.append(f"            {w.detail}")
        return "\n".join(lines)


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def new(self, name: str) -> Check:
        return self.add(Check(name))

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            if prefix:
                c.name = f"{prefix}{c.name}"
            self.checks.append(c)
        return self

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.checks)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def status_of(self, name: str) -> str:
        return self[name].status

    def machine(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "data": _render(self.data),
        }

    def machine_json(self) -> str:
        return json.dumps(self.machine(), sort_keys=True, indent=2)

    def text(self) -> str:
        head = f"{self.title}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + [c.text() for c in self.checks])

    def __str__(self):
        return self.text()
