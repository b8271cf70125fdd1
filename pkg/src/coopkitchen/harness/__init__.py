from .config import ExperimentConfig
from .runner import run_episode, run_batch
from .replay import ReplayResult, replay, replay_log_file

__all__ = [
    "ExperimentConfig",
    "ReplayResult",
    "replay",
    "replay_log_file",
    "run_batch",
    "run_episode",
]
