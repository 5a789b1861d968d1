"""Line-oriented ``key = value`` configuration files with dotted keys.

Values are kept as strings; call sites convert with the typed getters.
Lines starting with ``#`` and blank lines are ignored. Keys must be
unique; a duplicate is an error rather than a silent overwrite.
"""

from __future__ import annotations

from pathlib import Path


class ConfigFormatError(ValueError):
    """Raised for a malformed configuration line or key."""


def parse_config(text: str) -> dict[str, str]:
    """Parse config text into an ordered key -> value mapping."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigFormatError(f"line {lineno}: missing '=': {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigFormatError(f"line {lineno}: empty key: {line!r}")
        if key in out:
            raise ConfigFormatError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def format_config(entries: dict[str, str]) -> str:
    """Serialize a mapping as ``key = value`` lines in iteration order."""
    lines = []
    for key, value in entries.items():
        if not key or any(c in key for c in " \t\n="):
            raise ConfigFormatError(f"invalid key {key!r}")
        value = str(value)
        if "\n" in value:
            raise ConfigFormatError(f"value for {key!r} contains a newline")
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + ("\n" if lines else "")


def read_config(path: str | Path) -> dict[str, str]:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def write_config(path: str | Path, entries: dict[str, str]) -> None:
    Path(path).write_text(format_config(entries), encoding="utf-8")


def get_int(entries: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in entries:
        if default is None:
            raise ConfigFormatError(f"missing required key {key!r}")
        return default
    try:
        return int(entries[key])
    except ValueError:
        raise ConfigFormatError(
            f"key {key!r} is not an integer: {entries[key]!r}"
        ) from None


def get_float(
    entries: dict[str, str], key: str, default: float | None = None
) -> float:
    if key not in entries:
        if default is None:
            raise ConfigFormatError(f"missing required key {key!r}")
        return default
    try:
        return float(entries[key])
    except ValueError:
        raise ConfigFormatError(
            f"key {key!r} is not a number: {entries[key]!r}"
        ) from None


def get_bool(
    entries: dict[str, str], key: str, default: bool | None = None
) -> bool:
    if key not in entries:
        if default is None:
            raise ConfigFormatError(f"missing required key {key!r}")
        return default
    value = entries[key].lower()
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ConfigFormatError(f"key {key!r} is not a boolean: {entries[key]!r}")


def get_str(entries: dict[str, str], key: str, default: str | None = None) -> str:
    if key not in entries:
        if default is None:
            raise ConfigFormatError(f"missing required key {key!r}")
        return default
    return entries[key]
