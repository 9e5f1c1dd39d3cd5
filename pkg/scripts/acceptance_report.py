"""Run the acceptance suite and print only the per-criterion verdict lines.

    python3 scripts/acceptance_report.py
"""

from __future__ import annotations

import os
import subprocess
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", os.path.join(ROOT, "tests", "test_acceptance.py")],
        cwd=ROOT,
        capture_output=True,
        text=True,
    )
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith(("[PASS]", "[FAIL]"))]
    print("\n".join(lines))
    print(proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr)
    return proc.returncode


if __name__ == "__main__":
    raise SystemExit(main())
