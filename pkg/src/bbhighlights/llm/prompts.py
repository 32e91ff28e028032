"""Prompt templates with ``{{placeholder}}`` markers.

Templates are plain UTF-8 files so they can be edited without touching
code. Placeholder values are JSON-encoded on substitution.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from ..errors import MissingTemplate, UnresolvedPlaceholder
from .config import Task

DEFAULT_PROMPT_DIR = Path(__file__).with_name("templates")

_PLACEHOLDER = re.compile(r"\{\{\s*([A-Za-z_][A-Za-z0-9_ ]*?)\s*\}\}")


def template_path(task: Task, prompt_dir=None) -> Path:
    return Path(prompt_dir or DEFAULT_PROMPT_DIR) / f"{Task(task).value}.txt"


def load_template(task: Task, prompt_dir=None) -> str:
    path = template_path(task, prompt_dir)
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingTemplate(f"prompt template not found: {path}") from None


def placeholders(template: str) -> set[str]:
    return set(_PLACEHOLDER.findall(template))


def render_prompt(task: Task, payload: dict, prompt_dir=None) -> str:
    template = load_template(task, prompt_dir)
    missing = placeholders(template) - set(payload)
    if missing:
        raise UnresolvedPlaceholder(missing)

    def sub(m):
        return json.dumps(payload[m.group(1)], ensure_ascii=False, indent=None)

    return _PLACEHOLDER.sub(sub, template)
