import logging
import os
from dataclasses import dataclass, field
from typing import Dict

from dotenv import dotenv_values

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"


@dataclass
class RunManifest:
    """Everything needed to reproduce one run, written as key=value lines.

    Values are stored as the strings the CLI accepts, so a manifest can be
    fed back with ``--manifest``. No wall-clock timestamps are recorded.
    """

    command: str
    entries: Dict[str, str] = field(default_factory=dict)

    def record(self, key: str, value) -> None:
        if value is None:
            return
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        self.entries[key] = str(value)

    def render(self) -> str:
        lines = [f"command={self.command}"]
        lines += [f"{key}={_quote(value)}" for key, value in self.entries.items()]
        return "\n".join(lines) + "\n"

    def save(self, output_dir: str) -> str:
        os.makedirs(output_dir, exist_ok=True)
        filepath = os.path.join(output_dir, MANIFEST_NAME)
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(self.render())
        log.info(f"Manifest written to {filepath}")
        return filepath


def _quote(value: str) -> str:
    # dotenv strips unquoted whitespace and treats '#' as a comment
    if value != value.strip() or "#" in value or "'" in value or '"' in value:
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return value


def read_manifest(path: str) -> Dict[str, str]:
    """Load a manifest back into a flat dict of strings."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"manifest not found: {path}")
    values = {key: value for key, value in dotenv_values(path).items() if value is not None}
    if "command" not in values:
        log.warning(f"{path} has no 'command' entry")
    return values
