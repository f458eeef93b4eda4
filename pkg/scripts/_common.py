import argparse
import json
import sys
from pathlib import Path

from modspace.runtime import deterministic
from modspace.verify import _clean


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolutions", type=int, nargs="+")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--deterministic", action="store_true")
    return p


def emit(report: dict, out: str | None) -> None:
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(fn, args) -> None:
    with deterministic(args.deterministic):
        emit(fn(), args.out)
