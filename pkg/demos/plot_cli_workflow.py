"""
Command-line workflow
=====================

The ``minormax`` command wraps the library.  This script drives it the way
a shell user would: simulate, inspect the report, then recompute the KS
distance from the saved samples alone.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def cli(*args):
    cmd = [sys.executable, "-m", "minormax", *args]
    print("$ minormax " + " ".join(args))
    out = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    print(out.rstrip())
    return out


cli("cdf", "--law", "gumbel", "--z", "0")
cli("quantile", "--xi", "4", "--q", "0.5")

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run.json"
    cli("simulate", "--xi", "2", "--p", "300", "--reps", "200", "--seed", "42", "--out", str(out))
    report = json.loads(out.read_text())
    print({k: report[k] for k in ("ks", "n_samples", "law", "config_hash")})
    # the sidecar CSV holds every replicate; ks reads the law from the JSON
    cli("ks", str(out.with_suffix(".csv")))

cli("consistency", "--pgrid", "1e8,1e100")
