"""Driving the ``horolift`` command line from Python.

Each command reads a JSON configuration and writes ``report.json`` into the
output directory.  The same configurations work with the installed console
script, e.g. ``horolift verify --config verify.json --out results/``.

Run with ``python demos/command_line.py``.
"""
import json
import math
import tempfile
from pathlib import Path

from horolift import cli

configs = {
    "check-metric": {"n": 2, "factor": {"builtin": "mobius_cap", "params": {"s": 0.5, "dilation": 0.3}}},
    "verify": {"n": 3, "factor": {"builtin": "mobius_cap",
                                  "params": {"s": math.asinh(1.0), "dilation": math.log(2.0)}}},
    "solve-radial": {"n": 3, "data": {"sigma_k": 1},
                     "solve": {"mode": "annulus", "r": math.pi / 3, "symmetry": True}},
    "check-ellipticity": {"n": 3, "data": {"sigma_k": 2}, "samples": 500, "seed": 7},
}

with tempfile.TemporaryDirectory() as tmp:
    for command, cfg in configs.items():
        path = Path(tmp) / f"{command}.json"
        path.write_text(json.dumps(cfg))
        out = Path(tmp) / command
        code = cli.run([command, "--config", str(path), "--out", str(out)])
        report = json.loads((out / "report.json").read_text())
        print(f"  exit code {code}, report keys: {sorted(report)}")
