"""Regenerate the golden sweep CSV used by the determinism tests."""
import io
from pathlib import Path

from argsector.cli import run_command

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
GOLDEN_ARGS = ["sweep", "--spec", str(FIXTURES / "fryntov.json"), "--auto-radius", "--U", "10",
               "--sectors", "24", "--err", "5e-3", "--strict"]


def main():
    out = FIXTURES / "golden_sweep.csv"
    code = run_command(GOLDEN_ARGS + ["--out", str(out)], stdout=io.StringIO())
    if code != 0:
        raise SystemExit(f"sweep failed with exit code {code}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
