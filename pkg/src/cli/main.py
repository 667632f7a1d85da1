import argparse
import asyncio
import logging
import sys
from pathlib import Path

from cli.artifacts import ResultRecord, record_document
from cli.commands import COMMANDS
from cli.config import load_run_config
from config import get_settings
from database import RunStore, get_db_contextmanager, init_db
from exceptions import SimulationError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motional", description="Two-atom motional qubit-oscillator simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="run configuration JSON")
    common.add_argument("--out", type=str, default=None, help="output directory")
    common.add_argument("--strict", action="store_true", default=None, help="fail on cutoff population")
    common.add_argument("--threads", type=int, default=None, help="worker processes for sweeps")
    common.add_argument("--dt-check", action="store_true", default=None, help="rerun gates at half the step")
    common.add_argument("--no-store", action="store_true", help="do not record the run in the result store")

    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser("spectrum", parents=[common], help="relative-mode spectrum over u′")
    spectrum.add_argument("--u-min", type=float, default=None)
    spectrum.add_argument("--u-max", type=float, default=None)
    spectrum.add_argument("--points", type=int, default=None)
    spectrum.add_argument("--method", choices=["exact", "matrix"], default=None)
    spectrum.add_argument("--no-convergence-check", dest="check_convergence", action="store_false", default=None,
                          help="accept an unconverged truncated matrix")

    for name, text in (("gate", "run one native gate"), ("sweep", "fidelity against gate magnitude")):
        command = commands.add_parser(name, parents=[common], help=text)
        command.add_argument("--kind", type=str, default=None, help="D, R, SR, S, CD, CR or CS")
        command.add_argument("--magnitude", type=float, default=None)
        command.add_argument("--lam", type=float, default=None)
        command.add_argument("--u-prime", type=float, default=None)
        if name == "sweep":
            command.add_argument("--magnitudes", type=float, nargs="+", default=None)

    commands.add_parser("reproduce", parents=[common], help="headline infidelity table")

    tomography = commands.add_parser("tomography", parents=[common], help="χ and Wigner reconstruction")
    tomography.add_argument("--state", choices=["vacuum", "coherent", "cat", "squeezed", "post_gate"], default=None)
    tomography.add_argument("--alpha", type=float, nargs=2, default=None, metavar=("RE", "IM"))
    tomography.add_argument("--extent", type=float, default=None)
    tomography.add_argument("--spacing", type=float, default=None)

    layout = commands.add_parser("layout", parents=[common], help="coefficient matrix and base depths")
    layout.add_argument("--name", type=str, default=None, help="shipped layout name or JSON path")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    """Flag values as a nested override document; unset flags stay `None`."""
    values = vars(args)
    overrides = {
        "output_dir": values.get("out"),
        "strict": values.get("strict"),
        "threads": values.get("threads"),
        "dt_check": values.get("dt_check"),
        "physics": {"u_prime": values.get("u_prime")},
        "spectrum": {
            "u_min": values.get("u_min"),
            "u_max": values.get("u_max"),
            "points": values.get("points"),
            "method": values.get("method"),
            "check_convergence": values.get("check_convergence"),
        },
        "sweep": {"magnitudes": values.get("magnitudes")},
        "tomography": {
            "state": values.get("state"),
            "alpha": values.get("alpha"),
            "extent": values.get("extent"),
            "spacing": values.get("spacing"),
        },
        "layout": {"name": values.get("name")},
    }
    if values.get("kind") is not None:
        overrides["gate"] = {"kind": values["kind"], "magnitude": values.get("magnitude"), "lam": values.get("lam")}
    elif values.get("magnitude") is not None or values.get("lam") is not None:
        overrides["gate"] = {"magnitude": values.get("magnitude"), "lam": values.get("lam")}
    return overrides


async def store_record(record: ResultRecord):
    await init_db()
    async with get_db_contextmanager() as session:
        await RunStore(session).save(record.config_hash, record.command, record.tool_version,
                                     record_document(record))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(level=settings.LOG_LEVEL.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = load_run_config(args.config, overrides_from(args))
        run_settings = config.settings(settings)
        out_dir = Path(config.output_dir or settings.OUTPUT_DIR) / args.command
        record = COMMANDS[args.command](config, run_settings, out_dir)
    except SimulationError as e:
        logger.error("%s failed: %s", args.command, e)
        return e.exit_code
    if not args.no_store:
        Path(settings.PATH_TO_DB).parent.mkdir(parents=True, exist_ok=True)
        asyncio.run(store_record(record))
    logger.info("%s finished: %s (%s)", args.command, record.config_hash[:12], ", ".join(record.files))
    return 0


if __name__ == "__main__":
    sys.exit(main())
