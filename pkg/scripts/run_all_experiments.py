import os
import sys

# Runs every registered experiment at its desk-scale defaults and writes one
# CSV per experiment.
#
# Run from project root:
#   python scripts/run_all_experiments.py [output_dir] [threads]

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, PROJECT_ROOT)

from maxaffine.config import Config, configure_logging  # noqa: E402
from maxaffine.exceptions import MaxAffineError  # noqa: E402
from maxaffine.experiments import EXPERIMENTS, run_experiment  # noqa: E402


def main(out_dir: str, threads: int) -> int:
    failures = 0
    for name in EXPERIMENTS:
        print(f"[INFO] Running {name}...")
        try:
            table = run_experiment(name, threads=threads)
        except MaxAffineError as e:
            print(f"[ERROR] {name}: {e}")
            failures += 1
            continue
        path = table.to_csv(os.path.join(out_dir, f"{name}.csv"))
        print(f"[OK] {name}: {len(table)} rows -> {path}")
    return failures


if __name__ == '__main__':
    configure_logging(Config.LOG_LEVEL, Config.LOG_FILE)
    out_dir = sys.argv[1] if len(sys.argv) > 1 else Config.OUTPUT_DIR
    threads = int(sys.argv[2]) if len(sys.argv) > 2 else Config.THREADS
    sys.exit(1 if main(out_dir, threads) else 0)
