"""Simulators for the applications: each draws the statistic by Monte Carlo,
estimates its tails around the sample median and compares them with the
theorem's curve."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..verify import TailEstimate, compare_tail_to_bound, dumps, rows_to_csv


@dataclass
class AppReport:
    app: str
    params: dict
    seed: int
    tails: list = field(default_factory=list)
    aux: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)
    graded: bool = True

    def add_tail(self, equation: str, estimate: TailEstimate, curve, offset: float = 0.0):
        """Attach the comparison of one tail estimate with one bound curve.

        ``offset`` shifts the threshold the curve is evaluated at, for
        statements of the form P(|X - M| >= offset + u).
        """
        if not isinstance(curve, (list, tuple)):
            curve = [curve(u - offset) for u in estimate.u_grid]
        rows, verdict = compare_tail_to_bound(estimate, curve)
        for r in rows:
            r["equation"] = equation
            r["side"] = estimate.side
        self.tails.append({"equation": equation, "estimate": estimate.to_dict(), "rows": rows, "verdict": verdict})
        return verdict

    @property
    def rows(self) -> list:
        return [r for t in self.tails for r in t["rows"]]

    @property
    def verdict(self) -> str:
        if not self.graded:
            return "report"
        return "pass" if all(t["verdict"] == "pass" for t in self.tails) else "fail"

    def to_dict(self) -> dict:
        return {"app": self.app, "equation": [t["equation"] for t in self.tails], "params": self.params,
                "seed": self.seed, "rows": self.rows, "tails": self.tails, "aux": self.aux,
                "caveats": self.caveats, "verdict": self.verdict}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)
