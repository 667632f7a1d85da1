from cli.artifacts import TOOL_VERSION, ResultRecord
from cli.config import RunConfig, load_run_config
from cli.commands import (
    COMMANDS,
    cmd_gate,
    cmd_layout,
    cmd_reproduce,
    cmd_spectrum,
    cmd_sweep,
    cmd_tomography,
)
