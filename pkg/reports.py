"""
Result records shared by the bounds, the validators and the front ends.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

KINDS = ('lower', 'upper', 'exact')


def json_float(value: Any) -> Any:
    """Floats as JSON numbers; non-finite values as the strings 'inf', '-inf', 'nan'."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, float)):
        value = float(value)
        if math.isfinite(value):
            return value
        return str(value)
    return value


@dataclass(frozen=True)
class BoundReport:
    """
    One spectral gap bound.

    value is a lower bound on lambda_1 (kind 'lower'), an upper bound
    (kind 'upper') or the exact gap (kind 'exact'). assumptions_ok tells
    whether the method's hypotheses were verified for this problem.
    """

    value: float
    method: str
    kind: str = 'lower'
    assumptions_ok: bool = True
    diagnostics: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.assumptions_ok and not self.value >= 0.0:
            raise ValueError(f"{self.method}: a valid bound must be >= 0, got {self.value}")

    @property
    def certifies_lower(self) -> bool:
        """True when value may be used as a lower bound on the gap."""
        return self.assumptions_ok and self.kind in ('lower', 'exact')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'kind': self.kind,
            'value': json_float(self.value),
            'assumptions_ok': self.assumptions_ok,
            'diagnostics': {k: json_float(v) for k, v in sorted(self.diagnostics.items())},
            'notes': list(self.notes),
        }


def inapplicable(method: str, reason: str, kind: str = 'lower',
                 diagnostics: Dict[str, float] = None) -> BoundReport:
    """A report whose hypotheses do not hold; value 0."""
    return BoundReport(value=0.0, method=method, kind=kind, assumptions_ok=False,
                       diagnostics=dict(diagnostics or {}), notes=[reason])
