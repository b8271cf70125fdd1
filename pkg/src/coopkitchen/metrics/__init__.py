from .episode_log import EpisodeLog, TickLogRecord, load_episode_log
from .report import MetricsReport, compute_report
from .aggregate import Aggregate, borda, iqm_stderr

__all__ = [
    "Aggregate",
    "EpisodeLog",
    "MetricsReport",
    "TickLogRecord",
    "borda",
    "compute_report",
    "iqm_stderr",
    "load_episode_log",
]
