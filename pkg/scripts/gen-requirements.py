#!/usr/bin/env python3
"""Generate requirements.txt from pyproject.toml dependencies.

Reads [project].dependencies with tomllib and writes a requirements.txt
for environments that don't use uv/pip-tools. `--dev` appends the dev
extra.

Usage (pre-commit hook or manual):
    python scripts/gen-requirements.py [--dev]
"""

import argparse
import sys
import tomllib
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
PYPROJECT = PROJECT_ROOT / "pyproject.toml"
REQUIREMENTS = PROJECT_ROOT / "requirements.txt"

HEADER = """\
# Auto-generated from pyproject.toml by scripts/gen-requirements.py
# Do not edit manually -- update pyproject.toml instead.
"""


def read_dependencies(pyproject: Path, dev: bool = False) -> list[str]:
    with pyproject.open("rb") as f:
        project = tomllib.load(f).get("project", {})
    deps = list(project.get("dependencies", []))
    if dev:
        deps += project.get("optional-dependencies", {}).get("dev", [])
    return deps


def main() -> int:
    parser = argparse.ArgumentParser(description="Write requirements.txt from pyproject.toml")
    parser.add_argument("--dev", action="store_true", help="Include the dev extra.")
    args = parser.parse_args()

    if not PYPROJECT.exists():
        print(f"Error: {PYPROJECT} not found", file=sys.stderr)
        return 1
    try:
        deps = read_dependencies(PYPROJECT, dev=args.dev)
    except tomllib.TOMLDecodeError as e:
        print(f"Error: {PYPROJECT} is not valid TOML: {e}", file=sys.stderr)
        return 1
    if not deps:
        print("Warning: no dependencies found in pyproject.toml", file=sys.stderr)
        return 0

    content = HEADER + "\n".join(deps) + "\n"
    if REQUIREMENTS.exists() and REQUIREMENTS.read_text() == content:
        return 0
    REQUIREMENTS.write_text(content)
    print(f"  Updated {REQUIREMENTS.relative_to(PROJECT_ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
