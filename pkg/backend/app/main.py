import argparse
import logging
import sys
from typing import List, Optional

from app.core import settings, PhraseSmoothError
from app.cli import register_cluster, register_build, register_analyze, register_oov

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasesmooth",
        description="Class-based smoothing of phrase translation tables"
    )
    parser.add_argument(
        "--log-level",
        default=settings.LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (logs go to stderr)"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_cluster(subparsers)
    register_build(subparsers)
    register_analyze(subparsers)
    register_oov(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand. Exit status 0 on success, 1 on any pipeline error, 2 on usage errors."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr
    )
    logger.info(f"[CLI] {settings.APP_NAME} {args.command}")

    try:
        args.handler(args)
    except PhraseSmoothError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e.strerror or e}: {e.filename}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
