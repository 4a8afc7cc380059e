"""Crowd navigation benchmark: trajectory prediction, D* Lite planning, RL policy."""

import sys

from ._crowdnav import (
    Forest,
    NoPathError,
    ParseError,
    Planner,
    ValidationError,
    chebyshev,
    extract_features,
    nmse,
    run_cli,
    version,
)

__version__ = version()

__all__ = [
    "Forest",
    "NoPathError",
    "ParseError",
    "Planner",
    "ValidationError",
    "chebyshev",
    "extract_features",
    "nmse",
    "run_cli",
    "version",
    "main",
]


def main(argv=None):
    """Console entry point mirroring the native CLI."""
    args = list(sys.argv[1:] if argv is None else argv)
    code, out, err = run_cli(args)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
