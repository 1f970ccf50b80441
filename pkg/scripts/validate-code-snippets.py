#!/usr/bin/env python3
"""Validate the code snippets in the repository readmes.

Python blocks are checked for syntax with ast.parse() and never executed.
Bash blocks are checked for `rainbow-ttd run NAME` and `--config NAME` lines
that name an experiment or shipped config that does not exist. Experiment
names are read statically from the registry module, so the package does not
need to be importable.

Skipped Python blocks:
- Blocks containing '...' (ellipsis placeholders)
- Function signatures without bodies (e.g., 'def foo() -> None')
"""

import ast
import re
import sys

from pathlib import Path


READMES = ("readme.md", "packages/core/readme.md", "packages/cli/readme.md")
REGISTRY = Path("packages/core/rainbow_ttd/experiments/registry.py")
CONFIG_DIR = Path("packages/core/rainbow_ttd/configs")

RUN_PATTERN = re.compile(r"rainbow-ttd (?:run|show-config) ([\w-]+)")
CONFIG_PATTERN = re.compile(r"--config ([\w-]+)(?:\s|$)")


def extract_blocks(content: str, language: str) -> list[tuple[str, int]]:
    """Return (code, line_number) for each fenced block in the language."""
    blocks = []
    pattern = rf"```{language}\n(.*?)```"

    for match in re.finditer(pattern, content, re.DOTALL):
        line_number = content[: match.start()].count("\n") + 1
        blocks.append((match.group(1), line_number))

    return blocks


def registered_experiments(registry: Path) -> set[str]:
    """Read the keys of EXPERIMENT_REGISTRY without importing the package."""
    tree = ast.parse(registry.read_text(encoding="utf-8"))
    for node in ast.walk(tree):
        if (
            isinstance(node, ast.AnnAssign)
            and isinstance(node.target, ast.Name)
            and node.target.id == "EXPERIMENT_REGISTRY"
            and isinstance(node.value, ast.Dict)
        ):
            return {
                key.value
                for key in node.value.keys
                if isinstance(key, ast.Constant) and isinstance(key.value, str)
            }
    return set()


def should_skip_block(code: str) -> bool:
    if "..." in code:
        return True

    for line in code.split("\n"):
        stripped = line.strip()
        if stripped.startswith("def ") and not stripped.endswith(":"):
            return True

    return False


def validate_file(
    filepath: Path, experiments: set[str], configs: set[str]
) -> list[str]:
    content = filepath.read_text(encoding="utf-8")
    errors = []

    for code, line_number in extract_blocks(content, "python"):
        if should_skip_block(code):
            continue
        try:
            ast.parse(code)
        except SyntaxError as e:
            errors.append(f"{filepath}:{line_number}: {e.msg}")

    for code, line_number in extract_blocks(content, "bash"):
        for offset, line in enumerate(code.split("\n"), start=1):
            location = f"{filepath}:{line_number + offset}"
            for name in RUN_PATTERN.findall(line):
                if name not in experiments | configs:
                    errors.append(f"{location}: unknown experiment {name!r}")
            for name in CONFIG_PATTERN.findall(line):
                if name not in configs:
                    errors.append(f"{location}: unknown shipped config {name!r}")

    return errors


def main() -> int:
    """Run validation on every readme."""
    if not REGISTRY.exists():
        print(f"Error: {REGISTRY} not found (run from the repo root)", file=sys.stderr)
        return 1

    experiments = registered_experiments(REGISTRY)
    configs = {path.stem for path in CONFIG_DIR.glob("*.json")}
    readmes = [Path(name) for name in READMES if Path(name).exists()]
    all_errors = []

    for filepath in readmes:
        all_errors.extend(validate_file(filepath, experiments, configs))

    if all_errors:
        print(f"Found {len(all_errors)} problems in the readmes:\n")
        for error in all_errors:
            print(error)
        return 1

    print(f"All code snippets are valid (checked {len(readmes)} files)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
