"""Machine-readable verification reports with exact per-claim certificates."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

STATUS_VERIFIED = "verified"
STATUS_REFUTED = "refuted"
STATUS_INCONCLUSIVE = "inconclusive-truncation"

EXIT_CODES = {STATUS_VERIFIED: 0, STATUS_REFUTED: 2, STATUS_INCONCLUSIVE: 3}


@dataclass
class VerificationReport:
    example_id: str
    status: str = STATUS_VERIFIED
    evidence: list = field(default_factory=list)   # [{"claim":..., "certificate":...}]
    truncation: str = ""
    wall_time_ms: int = 0
    seed: int = None
    notes: list = field(default_factory=list)

    def claim(self, text, certificate):
        self.evidence.append({"claim": text, "certificate": certificate})

    def note(self, text):
        self.notes.append(text)

    def finish(self, started_at):
        self.wall_time_ms = int((time.monotonic() - started_at) * 1000)
        if self.status == STATUS_VERIFIED and not self.evidence:
            raise ValueError("a verified report needs per-claim certificates")
        return self

    def to_json(self):
        return {
            "example_id": self.example_id,
            "status": self.status,
            "evidence": self.evidence,
            "truncation": self.truncation,
            "wall_time_ms": self.wall_time_ms,
            "seed": self.seed,
            "notes": self.notes,
        }

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")

    def exit_code(self):
        return EXIT_CODES[self.status]


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "dgdef verification report",
    "type": "object",
    "required": ["example_id", "status", "evidence", "truncation", "wall_time_ms"],
    "properties": {
        "example_id": {"type": "string"},
        "status": {"enum": [STATUS_VERIFIED, STATUS_REFUTED, STATUS_INCONCLUSIVE]},
        "evidence": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["claim", "certificate"],
                "properties": {
                    "claim": {"type": "string"},
                    "certificate": {},
                },
            },
        },
        "truncation": {"type": "string"},
        "wall_time_ms": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}
