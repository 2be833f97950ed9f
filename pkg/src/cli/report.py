"""
Reports
=======

JSON report documents for stdout and fixed-column CSV trajectories.
"""

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)


def fmt(value: float) -> str:
    """17 significant digits."""
    return f"{value:.17g}"


def _plain(value: Any) -> Any:
    """numpy scalars and arrays into JSON-native values."""
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class Record:
    """One named result; records without a tolerance are informational."""
    name: str
    value: Any = None
    residual: Optional[float] = None
    tolerance: Optional[float] = None

    @property
    def passed(self) -> bool:
        if self.tolerance is None or self.residual is None:
            return True
        return self.residual <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": _plain(self.value),
            "residual": None if self.residual is None else float(self.residual),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class ReportDocument:
    command: str
    manifest: str
    manifest_sha256: str
    seed: int
    records: List[Record] = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    def add(self, name: str, value: Any = None, residual: Optional[float] = None,
            tolerance: Optional[float] = None) -> Record:
        record = Record(name, value, residual, tolerance)
        self.records.append(record)
        if not record.passed:
            logger.warning(f"{name}: residual {record.residual:.3e} above tolerance {tolerance:.1e}")
        return record

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self, timestamp: bool = True) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "command": self.command,
            "manifest": self.manifest,
            "manifest_sha256": self.manifest_sha256,
            "seed": self.seed,
            "pass": self.passed,
            "results": [r.to_dict() for r in self.records],
        }
        if timestamp:
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
            doc["wall_time"] = round(time.perf_counter() - self.started, 6)
        return doc

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[float]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(float(v)) for v in row])
    logger.info(f"wrote {len(rows)} rows to {path}")
