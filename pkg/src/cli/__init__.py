from src.cli.manifest import Manifest, ManifestError, Region
from src.cli.report import Record, ReportDocument, write_csv
from src.cli.commands import (
    COMMANDS,
    RunContext,
    UsageError,
    cmd_check,
    cmd_geodesic,
    cmd_transport,
    cmd_holonomy,
    cmd_classes,
    cmd_modular,
    cmd_integral,
)

__all__ = [
    "Manifest", "ManifestError", "Region", "Record", "ReportDocument", "write_csv",
    "COMMANDS", "RunContext", "UsageError",
    "cmd_check", "cmd_geodesic", "cmd_transport", "cmd_holonomy", "cmd_classes", "cmd_modular", "cmd_integral",
]
