"""
observation.py

Observed clue values extracted from one datum.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from core.errors import MissingObservationError


@dataclass(frozen=True)
class CluesObservation:
    """
    Observed symbol z_i per feature name, plus optional conditioning
    symbols z_i^c for conditional features.
    """
    values: Mapping[str, str]
    conditioners: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", {str(k): str(v) for k, v in self.values.items()})
        object.__setattr__(
            self, "conditioners", {str(k): str(v) for k, v in self.conditioners.items()}
        )

    def value(self, feature: str) -> str:
        try:
            return self.values[feature]
        except KeyError:
            raise MissingObservationError(f"No observed value for feature '{feature}'")

    def conditioner(self, feature: str) -> Optional[str]:
        return self.conditioners.get(feature)

    def as_dict(self) -> Dict[str, object]:
        doc: Dict[str, object] = dict(self.values)
        if self.conditioners:
            doc["conditioners"] = dict(self.conditioners)
        return doc
