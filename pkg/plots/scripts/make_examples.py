#!/usr/bin/env python3
"""Regenerate the example CSVs under plots/examples/.

Everything is produced through the pairselect CLI (the only interface this
package consumes), with fixed seeds, so reruns are byte-identical. Run from
the plots/ directory:  python scripts/make_examples.py
"""

from __future__ import annotations

import json
import pathlib
import subprocess
import tempfile

EXAMPLES = pathlib.Path(__file__).resolve().parents[1] / "examples"


def run_sweep(algorithm: str, out_path: pathlib.Path) -> None:
    config = {
        "instance": {"model": "equal_gap", "n": 20, "p": 0.6, "seed": 0},
        "algorithm": algorithm,
        "params": {"k": 2, "epsilon": 0.2, "delta": 0.1},
        "trials": 10,
        "master_seed": 314159,
        "sweep": {"axis": "n", "values": [20, 40, 80]},
    }
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump(config, handle)
        cfg_path = handle.name
    subprocess.run(
        ["pairselect", "run", "--config", cfg_path, "--out", str(out_path)],
        check=True,
    )
    pathlib.Path(cfg_path).unlink()


def run_bounds(out_path: pathlib.Path) -> None:
    subprocess.run(
        [
            "pairselect", "bounds",
            "--gap", "0.1", "--delta", "0.01", "--k", "1",
            "--n-grid", "10:1000:log:12",
            "--out", str(out_path),
        ],
        check=True,
    )


def main() -> None:
    EXAMPLES.mkdir(parents=True, exist_ok=True)
    run_sweep("tks", EXAMPLES / "tks_vary_n.csv")
    run_sweep("eqs", EXAMPLES / "eqs_vary_n.csv")
    run_bounds(EXAMPLES / "bound_growth.csv")
    for name in ("tks_vary_n.csv", "eqs_vary_n.csv", "bound_growth.csv"):
        print(f"wrote {EXAMPLES / name}")


if __name__ == "__main__":
    main()
