"""Shared helpers for the experiment scripts."""
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "tests" / "fixtures"

from argsector.functions import build_function  # noqa: E402
from argsector.specio import parse_document  # noqa: E402


def load_ensemble(name):
    data = json.loads((FIXTURES / "ensembles.json").read_text(encoding="utf-8"))
    out = []
    for item in data[name]:
        doc = parse_document(json.dumps(item["spec"]))
        out.append((item, build_function(doc.spec, doc.order)))
    return out


def emit(rows, header, out=None):
    fh = open(out, "w", encoding="utf-8", newline="\n") if out else sys.stdout
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(v if isinstance(v, str) else repr(v) for v in row) + "\n")
    if out:
        fh.close()
