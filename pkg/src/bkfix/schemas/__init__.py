"""JSON schemas for ``bk --json`` reports, one per subcommand."""

import json
from importlib import resources

COMMANDS = ("eval", "complete", "fixpoint", "cycle", "compose", "counterexample", "coalgebra", "certify")


def load(command: str) -> dict:
    if command not in COMMANDS:
        raise KeyError(command)
    text = resources.files(__name__).joinpath(f"{command}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
