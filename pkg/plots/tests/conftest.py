import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PLOTS_DIR))

CONFIG_YAML = """\
schema_version: 1
carrier_frequency: 2.6e+9
seed: 13
arrays:
  tx: {elements: 32}
  rx: {elements: 2}
clusters:
  count: 5
  rays: 6
"""


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "mmgbsm.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def golden(tmp_path_factory):
    """CSV artifacts produced through the simulator CLI."""
    root = tmp_path_factory.mktemp("golden")
    config = root / "config.yaml"
    config.write_text(CONFIG_YAML)
    c = ["--config", str(config)]
    run_cli("evolve", *c, "--out", str(root / "evolve"))
    run_cli("stats", "power", *c, "--out", str(root / "power"), "--sigma-db", "2,4,8")
    run_cli("stats", "kfactor", *c, "--out", str(root / "kfactor"), "--sigma-db", "2,4,8")
    run_cli("stats", "ccf", *c, "--out", str(root / "ccf"),
            "--ref-antennas", "1,16,32", "--max-spacing", "8")
    run_cli("aps", *c, "--out", str(root / "aps"), "--grid-step-deg", "1.0")
    return {
        "evolve": root / "evolve" / "evolve.csv",
        "power": root / "power" / "power.csv",
        "kfactor": root / "kfactor" / "kfactor.csv",
        "ccf": root / "ccf" / "ccf.csv",
        "aps": root / "aps" / "aps.csv",
    }
