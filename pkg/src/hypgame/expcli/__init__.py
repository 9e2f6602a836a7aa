from .config import ConfigError, RunConfig, load_config
from .output import emit_outputs
from .runner import SweepRow, run_best_response_scan, run_exponent_sweep, run_np_experiment
