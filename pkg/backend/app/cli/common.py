"""Helpers shared by the subcommands: RunConfig assembly, argument types, output layout."""

import argparse
import logging
from pathlib import Path
from typing import Dict, List

from pydantic import ValidationError

from app.core.errors import ConfigurationError
from app.schemas import FeatureGroup, RunConfig
from app.services.table_emit import emit_manifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"


def comma_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def feature_list(value: str) -> List[FeatureGroup]:
    try:
        return [FeatureGroup(item) for item in comma_list(value)]
    except ValueError:
        choices = ", ".join(g.value for g in FeatureGroup)
        raise argparse.ArgumentTypeError(f"feature groups must be among: {choices}")


def fraction_list(value: str) -> List[float]:
    try:
        return [float(item) for item in comma_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid fraction list '{value}'")


def named_path(value: str) -> List[str]:
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got '{value}'")
    return [name, path]


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", required=True, help="Directory receiving every output file")


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    """RunConfig from parsed flags; unset flags fall back to settings defaults."""
    fields = {
        name: value for name, value in vars(args).items()
        if value is not None and name in RunConfig.model_fields and name != "command"
    }
    systems = getattr(args, "system", None)
    if systems:
        fields["systems"] = _systems(systems)
    try:
        return RunConfig(command=command, **fields)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        )
        raise ConfigurationError(f"invalid configuration: {problems}") from exc


def _systems(pairs: List[List[str]]) -> Dict[str, str]:
    systems: Dict[str, str] = {}
    for name, path in pairs:
        if name in systems:
            raise ConfigurationError(f"system '{name}' given twice")
        systems[name] = path
    return systems


def prepare_output(config: RunConfig) -> Path:
    """Create the output directory and write the run manifest into it."""
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    emit_manifest(config, output_dir / MANIFEST_NAME)
    return output_dir
