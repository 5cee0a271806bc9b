"""Golden-file cases shared by the CLI tests and the acceptance suite.

Set ``OPLAB_REGEN_GOLDEN=1`` to rewrite ``tests/golden`` from the current build.
"""

import os
import subprocess
import sys
from pathlib import Path

TESTS = Path(__file__).parent
SCENARIOS = TESTS / "scenarios"
GOLDEN = TESTS / "golden"

# (golden file, subcommand, scenario)
GOLDEN_CASES = [
    ("analyze_shift_to_sink.json", "analyze", "shift_to_sink.json"),
    ("analyze_null_source.json", "analyze", "null_source.json"),
    ("analyze_singular.json", "analyze", "singular.json"),
    ("norm_grid_linear.json", "norm", "grid_linear_norm.json"),
    ("verify_grid_contraction.json", "verify", "grid_contraction.json"),
]


def run_cli(*args, env=None, cwd=None):
    """Run ``python -m oplab.cli`` in a fresh process."""
    full_env = dict(os.environ)
    full_env.pop("OPLAB_SEED", None)
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "oplab.cli", *map(str, args)],
        capture_output=True,
        text=True,
        env=full_env,
        cwd=cwd,
    )


def golden_json(command, scenario):
    proc = run_cli(command, SCENARIOS / scenario, "--json", "-")
    return proc.returncode, proc.stdout


if os.environ.get("OPLAB_REGEN_GOLDEN") == "1":
    GOLDEN.mkdir(exist_ok=True)
    for name, command, scenario in GOLDEN_CASES:
        (GOLDEN / name).write_text(golden_json(command, scenario)[1], encoding="utf-8")
