"""
Recording and exporting the results of verification runs.

Defines:
    - ReportStatus: Enumeration of possible report outcomes.
    - VerifyReport: Dataclass recording oracle mismatches, invariant audits and
      engine statistics, exportable to YAML.
"""
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from omv_tools.ui.typer.i18n import _


class ReportWriter:
    """
    Utility class to export VerifyReport instances to YAML files.
    """

    @staticmethod
    def to_yaml(report: "VerifyReport", path: Optional[Path]) -> str:
        def plain(obj):
            if isinstance(obj, dict):
                return {str(k): plain(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [plain(v) for v in obj]
            if isinstance(obj, Path):
                return str(obj)
            if isinstance(obj, Enum):
                return obj.value
            if hasattr(obj, "item"):  # numpy scalars
                return obj.item()
            return obj

        data = plain(asdict(report))
        yaml_str = yaml.safe_dump(data, sort_keys=False, allow_unicode=True)
        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                f.write(yaml_str)
        return yaml_str


class ReportReader:
    """
    Utility class to load VerifyReport instances from YAML files.
    """

    @classmethod
    def from_yaml(cls, path: Path) -> "VerifyReport":
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
        return VerifyReport(**data)


class ReportStatus(str, Enum):
    """
    Global outcome of a verification run.

    - ``success``: no failed audit and, for exact engines, no mismatch.
    - ``failed``: at least one failed audit, or a mismatch of an exact engine.
    """
    SUCCESS = "success"
    FAILED = "failed"


@dataclass()
class VerifyReport:
    """
    Outcome of running an engine against its oracle on identical inputs.

    :ivar title: Descriptive title of the report.
    :vartype title: str
    :ivar engine: Engine name.
    :vartype engine: str
    :ivar exact: Whether the engine promises exact answers. Mismatches of
        engines that are only correct with high probability are recorded but do
        not fail the report.
    :vartype exact: bool
    :ivar config: Run configuration (sizes, seed, parameters).
    :vartype config: Dict[str, Any]
    :ivar mismatches: One entry per query whose answer differs from the oracle.
    :vartype mismatches: List[Dict[str, Any]]
    :ivar audits: Map of audit name to ``{"passed": bool, "detail": str}``.
    :vartype audits: Dict[str, Dict[str, Any]]
    :ivar statistics: Engine counters (step entries, extractions, probes...).
    :vartype statistics: Dict[str, Any]
    """
    title: str
    engine: str = "generic"
    exact: bool = True
    config: Dict[str, Any] = field(default_factory=dict)
    start_time: datetime = field(default_factory=datetime.now)
    end_time: Optional[datetime] = None
    queries: int = 0
    mismatches: List[Dict[str, Any]] = field(default_factory=list)
    audits: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    statistics: Dict[str, Any] = field(default_factory=dict)

    def add_mismatch(self, query: int, expected: Any, got: Any, **extra: Any) -> None:
        """
        Record a query whose answer differs from the oracle.

        :param query: Index of the query in the run.
        :param expected: Oracle answer.
        :param got: Engine answer.
        :param extra: Additional metadata (e.g. the workload kind).
        """
        self.mismatches.append({"query": query, "expected": expected, "got": got, **extra})

    def add_audit(self, name: str, passed: bool, detail: str = "") -> None:
        """Record the result of an invariant audit."""
        self.audits[name] = {"passed": bool(passed), "detail": detail}

    def finish(self) -> None:
        """Marks the report as finished by setting the end time."""
        self.end_time = datetime.now()

    def failed_audits(self) -> List[str]:
        return [name for name, a in self.audits.items() if not a.get("passed")]

    def get_status(self) -> ReportStatus:
        if self.failed_audits() or (self.exact and self.mismatches):
            return ReportStatus.FAILED
        return ReportStatus.SUCCESS

    def is_success(self) -> bool:
        return self.get_status() == ReportStatus.SUCCESS

    @property
    def error_rate(self) -> float:
        return len(self.mismatches) / self.queries if self.queries else 0.0

    def summary(self) -> str:
        """
        Human-readable summary: timestamps, duration, counts and overall status.

        :return: Multiline summary string suitable for console or log output.
        :rtype: str
        """
        duration = None
        if self.end_time:
            duration = (self.end_time - self.start_time).total_seconds()

        lines = [
            _(f"Report '{self.title}'"),
            _(f"  Engine: {self.engine}"),
            _(f"  Start: {self.start_time}"),
            _(f"  End: {self.end_time or 'in progress'}"),
            _(f"  Status: {self.get_status().value}"),
        ]
        if duration:
            lines.append(_(f"  Duration: {duration:.2f}s"))
        lines.append(_(f"  Queries: {self.queries}"))
        lines.append(_(f"  Mismatches: {len(self.mismatches)} (rate {self.error_rate:.4f})"))
        failed = self.failed_audits()
        lines.append(_(f"  Audits: {len(self.audits) - len(failed)}/{len(self.audits)} passed"))
        for name in failed:
            lines.append(f"    - {name}: {self.audits[name].get('detail', '')}")
        return "\n".join(lines)

    @classmethod
    def from_yaml(cls, filepath: Path) -> "VerifyReport":
        return ReportReader.from_yaml(filepath)

    def to_yaml(self, filepath: Path | None = None) -> str:
        """
        Converts the report to a YAML string and optionally saves it to a file.

        :param filepath: If provided, the YAML is also written there (UTF-8).
        :return: The YAML representation of the report.
        """
        return ReportWriter.to_yaml(self, filepath)
