"""Structured results for verification runs.

A WitnessReport records what was claimed (claim_id plus named integer
parameters), what came out of the search, and how far the search went.
Outcomes are one of three strings:

    "witness"        -- the claim is existential and we found the object;
                        the object(s) are in ``values``.
    "verified"       -- an exhaustive check of the stated range found no
                        violation.
    "counterexample" -- an exhaustive check *did* find a violation; the
                        offending parameters are in ``values``.

A counterexample outcome is only ever produced after the search within
``search_bound`` actually completed; aborted searches raise instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class WitnessReport:
    claim_id: str
    parameters: dict[str, int] = field(default_factory=dict)
    outcome: str = "verified"
    values: list = field(default_factory=list)
    search_bound: int = 0

    def __post_init__(self):
        if self.outcome not in ("witness", "verified", "counterexample"):
            raise ValueError(f"unknown outcome {self.outcome!r}")

    @property
    def ok(self) -> bool:
        return self.outcome != "counterexample"

    def to_json_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "parameters": dict(self.parameters),
            "outcome": self.outcome,
            "values": list(self.values),
            "search_bound": self.search_bound,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "WitnessReport":
        return cls(
            claim_id=d["claim_id"],
            parameters={k: v for k, v in d["parameters"].items()},
            outcome=d["outcome"],
            values=[tuple(v) if isinstance(v, list) else v for v in d["values"]],
            search_bound=d["search_bound"],
        )
