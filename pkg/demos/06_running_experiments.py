"""
Experiments from code and from the shell
========================================

Every experiment is described by a flat configuration.  The same run can be
started from Python, as here, or from the shell:

    qrc zeno-demo --config configs/zeno-demo.conf --out results zeno_samples=101

Both write ``<experiment>.csv`` and ``<experiment>.summary.json``.
"""
import json
import tempfile
from pathlib import Path

from qrc.config import build_config, parse_config_text
from qrc.experiments import run_experiment, write_outputs

# configuration text: dashes and underscores are interchangeable
text = """
# two atomic drive strengths, a short window
zeno-gz = 0.5, 5
zeno_t_max = 1.0
zeno_samples = 51
"""
cfg = build_config("zeno-demo", parse_config_text(text), overrides={"seed": 7})
print("config hash:", cfg.config_hash())

result = run_experiment(cfg)
print("columns:", result.columns)
print("metrics:", result.summary.metrics)

with tempfile.TemporaryDirectory() as tmp:
    csv_path, json_path = write_outputs(result, tmp)
    print("\n" + "".join(Path(csv_path).read_text().splitlines(True)[:4]))
    summary = json.loads(Path(json_path).read_text())
    print("summary keys:", list(summary))
