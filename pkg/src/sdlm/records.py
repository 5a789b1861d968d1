"""Dataset records and their tab-separated on-disk format.

One record per line with four fields: task name, user text, think text,
reply text. Tabs, newlines, and backslashes inside fields are escaped so
the format stays total over arbitrary text. Lines starting with ``#`` and
blank lines are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .sequence import TaskKind, validate_fields


class RecordFormatError(ValueError):
    """Raised for a malformed dataset line."""


@dataclass(frozen=True)
class DatasetRecord:
    """One supervised example; unused fields are empty strings."""

    task: TaskKind
    user_text: str
    think_text: str
    reply_text: str

    def __post_init__(self) -> None:
        validate_fields(self.task, self.user_text, self.think_text,
                        self.reply_text)


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n"}


def escape_field(text: str) -> str:
    """Escape backslash, tab, and newline for one TSV field."""
    out = []
    for ch in text:
        out.append(_ESCAPES.get(ch, ch))
    return "".join(out)


def unescape_field(text: str) -> str:
    """Invert escape_field; reject dangling or unknown escapes."""
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(text):
            raise RecordFormatError(f"dangling backslash in field: {text!r}")
        marker = text[i + 1]
        if marker not in _UNESCAPES:
            raise RecordFormatError(f"unknown escape \\{marker} in field: {text!r}")
        out.append(_UNESCAPES[marker])
        i += 2
    return "".join(out)


def format_record(record: DatasetRecord) -> str:
    """Serialize one record as a single TSV line (no trailing newline)."""
    fields = (record.user_text, record.think_text, record.reply_text)
    return "\t".join([record.task.value] + [escape_field(f) for f in fields])


def parse_record(line: str) -> DatasetRecord:
    """Parse one TSV line back into a record."""
    parts = line.split("\t")
    if len(parts) != 4:
        raise RecordFormatError(
            f"expected 4 tab-separated fields, got {len(parts)}: {line!r}"
        )
    name = parts[0]
    try:
        task = TaskKind(name)
    except ValueError:
        raise RecordFormatError(f"unknown task name {name!r}") from None
    user, think, reply = (unescape_field(p) for p in parts[1:])
    return DatasetRecord(task=task, user_text=user, think_text=think,
                         reply_text=reply)


def write_records(
    path: str | Path,
    records: list[DatasetRecord],
    header: str | None = None,
) -> None:
    """Write a dataset file, optionally preceded by a comment header."""
    lines = []
    if header is not None:
        lines.extend(f"# {line}" for line in header.splitlines())
    lines.extend(format_record(r) for r in records)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_records(path: str | Path) -> list[DatasetRecord]:
    """Read a dataset file, skipping comments and blank lines."""
    records = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            records.append(parse_record(line))
        except ValueError as exc:
            raise RecordFormatError(f"{path}:{lineno}: {exc}") from exc
    return records


def by_task(records: list[DatasetRecord]) -> dict[TaskKind, list[DatasetRecord]]:
    """Group records by task, preserving order within each task."""
    groups: dict[TaskKind, list[DatasetRecord]] = {}
    for record in records:
        groups.setdefault(record.task, []).append(record)
    return groups
