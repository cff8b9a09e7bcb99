"""
Entry point for `python -m sdi_lab` and the `sdilab` console script.
"""
import sys
from typing import Optional, Sequence

from sdi_lab.cli import run


def main(args: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if args is None else args))


if __name__ == "__main__":
    main()
