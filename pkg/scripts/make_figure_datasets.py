#!/usr/bin/env python3
"""Generate the five figure datasets at full scale into out/figures/.

Equivalent to `ratingdyn figures --config <default>`; takes a couple of
minutes' worth of CPU in total, dominated by the bifurcation sweep and the
40 randomized-order simulations.
"""

import json
import sys
import tempfile
from pathlib import Path

from ratingdyn.cli import main

OUT = Path("out/figures")

CONFIG = {
    "seed": 12345,
    "out_dir": str(OUT),
    "figures": {
        "fig1a": {"lambda_count": 11, "grid_count": 101},
        "fig1b": {"lines": 10, "agents": 10000, "grid_count": 101},
        "fig2left": {"alphas": [0.1, 0.3, 3.0], "grid_count": 1001},
        "fig2right": {"alpha": 0.3, "agents": 10000, "reps": 40, "stride": 20},
        "fig3": {"start": 0.1, "stop": 3.0, "count": 60, "mu": 0.7},
    },
}

if __name__ == "__main__":
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump(CONFIG, handle)
        config_path = handle.name
    sys.exit(main(["figures", "--config", config_path] + sys.argv[1:]))
