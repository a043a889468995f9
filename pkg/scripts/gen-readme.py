#!/usr/bin/env python3
"""Regenerate src/cphase_witness/README.md from the package docstring.

Usage (pre-commit hook or manual):
    python scripts/gen-readme.py           # rewrite when stale
    python scripts/gen-readme.py --check   # exit 1 when stale, write nothing
"""

import argparse
import ast
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
PACKAGE_DIR = PROJECT_ROOT / "src" / "cphase_witness"

FOOTER = "*Auto-generated from `__init__.py` docstring by `scripts/gen-readme.py`.*"


def package_docstring(package_dir: Path) -> str | None:
    init_file = package_dir / "__init__.py"
    try:
        tree = ast.parse(init_file.read_text(encoding="utf-8"))
    except (OSError, SyntaxError) as e:
        print(f"Error: cannot parse {init_file}: {e}", file=sys.stderr)
        return None
    return ast.get_docstring(tree)


def render(title: str, docstring: str) -> str:
    """Title line, then the summary paragraph as prose and the rest fenced."""
    summary, _, body = docstring.partition("\n\n")
    lines = [f"# {title}", "", summary.strip(), ""]
    if body.strip():
        lines += ["```text", body.rstrip(), "```", ""]
    lines += ["---", FOOTER, ""]
    return "\n".join(lines)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--check", action="store_true", help="Fail instead of writing.")
    args = parser.parse_args()

    docstring = package_docstring(PACKAGE_DIR)
    if not docstring:
        return 1
    readme = PACKAGE_DIR / "README.md"
    content = render(PACKAGE_DIR.name, docstring)
    current = readme.read_text(encoding="utf-8") if readme.exists() else None
    if current == content:
        return 0
    if args.check:
        print(f"  Stale: {readme.relative_to(PROJECT_ROOT)}", file=sys.stderr)
        return 1
    readme.write_text(content, encoding="utf-8")
    print(f"  Updated {readme.relative_to(PROJECT_ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
