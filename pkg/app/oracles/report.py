import logging
from dataclasses import dataclass, field
from typing import Any, List

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleRow:
    batch_index: int
    expected: Any
    observed: Any
    match: bool


@dataclass
class OracleReport:
    """Per-batch comparison of distributed results with a reference."""
    scenario: str = ""
    rows: List[OracleRow] = field(default_factory=list)

    def add(self, batch_index: int, expected: Any, observed: Any) -> bool:
        match = expected == observed
        self.rows.append(OracleRow(batch_index, expected, observed, match))
        if not match:
            logger.error("%s: oracle mismatch at batch %d", self.scenario or "run", batch_index)
        return match

    @property
    def ok(self) -> bool:
        return all(row.match for row in self.rows)

    def mismatches(self) -> List[OracleRow]:
        return [row for row in self.rows if not row.match]

    def __len__(self) -> int:
        return len(self.rows)
