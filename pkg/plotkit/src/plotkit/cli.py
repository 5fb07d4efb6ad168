"""Command-line entry point: ``plotkit job.json``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .render import JobError, plot


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render a plot job described in JSON."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("job", help="path to a plot job JSON file")
    args = parser.parse_args(argv)
    path = Path(args.job)
    try:
        job = json.loads(path.read_text())
    except OSError as exc:
        print(f"error: cannot read job: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: job is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        # paths inside the job resolve against the job file's directory
        plot(job, base_dir=path.parent)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
