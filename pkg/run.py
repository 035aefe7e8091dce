import os
import sys
from typing import Dict, List, Tuple
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from app.config import CONFIG
from app.errors import ConfigError, DataError, KfsaError, NumericalError
from app.experiments import build_config, run_experiment
from app.logger import configure_logging, log


def _parse_cli_args(extra_args: List[str]) -> Tuple[Dict[str, object], List[str]]:
    """Parse CLI-style ``--key value`` pairs and return remaining positional args."""

    consumed_indexes: set[int] = set()
    cli_params: Dict[str, object] = {}

    i = 0
    while i < len(extra_args):
        token = extra_args[i]
        if token.startswith("--") and len(token) > 2:
            key = token[2:].strip().replace("-", "_")
            if not key:
                i += 1
                continue
            consumed_indexes.add(i)
            value: object = True
            if i + 1 < len(extra_args) and not extra_args[i + 1].startswith("--"):
                value = extra_args[i + 1]
                consumed_indexes.add(i + 1)
                i += 2
            else:
                i += 1
            cli_params[key] = value
        else:
            i += 1

    residual = [token for idx, token in enumerate(extra_args) if idx not in consumed_indexes]
    return cli_params, residual


def _print_usage() -> None:
    usage = (
        "Usage:\n"
        "  python run.py <mnist|fpu|calcofi|generic> [options]\n"
        "  python run.py --experiment <name> [--config file.yaml] [options]\n"
        "Options: --kernel --kappa --epsilon --gamma --train --test --subsample --seed --out\n"
        "         --format {csv,json} --low-memory --nystrom {off,uniform,leverage} --budget-match\n"
        "         --budget --chunk-size --save-model --cache --include-full --dispatch --workers\n"
    )
    print(usage.strip())


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if not args or args[0] in ("-h", "--help", "help"):
        _print_usage()
        return 0 if args else 1

    try:
        cli_params, residual_args = _parse_cli_args(args)
    except ValueError as exc:
        print(f"[dispatcher error] {exc}", file=sys.stderr)
        return 1

    if residual_args:
        if "experiment" in cli_params or len(residual_args) > 1:
            print(f"[dispatcher error] Unexpected arguments: {' '.join(residual_args)}", file=sys.stderr)
            _print_usage()
            return 1
        cli_params["experiment"] = residual_args[0]

    config_path = cli_params.pop("config", None)
    if isinstance(config_path, bool):
        print("[dispatcher error] --config flag requires a value.", file=sys.stderr)
        return 1
    if "experiment" not in cli_params and config_path is None:
        print("[dispatcher error] Missing experiment name.", file=sys.stderr)
        _print_usage()
        return 1

    configure_logging(CONFIG.log_level)

    try:
        config = build_config(cli_params, config_path)
        paths = run_experiment(config)
    except ConfigError as exc:
        print(f"[dispatcher error] configuration: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except DataError as exc:
        print(f"[dispatcher error] data: {exc}", file=sys.stderr)
        return DataError.exit_code
    except NumericalError as exc:
        print(f"[dispatcher error] numerical: {type(exc).__name__}: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    except KfsaError as exc:
        print(f"[dispatcher error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        print(f"[dispatcher error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    log(f"[dispatcher] wrote {len(paths)} files to {config.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
