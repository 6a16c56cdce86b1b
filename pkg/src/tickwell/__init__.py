"""tickwell: event-driven hardware simulation with activity-gated ticking.

Integer virtual time, windowed event dispatch, message buffers with
availability backpropagation, task-based tracing, periodic metrics sampling,
a conservative parallel engine, and a live HTTP monitor.
"""

from .config import ExperimentConfig, load_config
from .core import (ConfigurationError, Engine, TerminalStateError,
                   TickwellError, next_cycle_time, period_of)
from .experiment import RunResult, build_world, compare_runs, run_experiment
from .messaging import Buffer, Connection, Message, Port
from .models import build_scenario
from .sampling import Sampler
from .ticking import TickingElement
from .tracing import (AverageTimeTracer, BusyTimeTracer, DBTracer,
                      InstrumentationError, TagCountTracer, Task,
                      TotalTimeTracer)
from .world import World

__all__ = [
    "AverageTimeTracer", "Buffer", "BusyTimeTracer", "ConfigurationError",
    "Connection", "DBTracer", "Engine", "ExperimentConfig",
    "InstrumentationError", "Message", "Port", "RunResult", "Sampler",
    "TagCountTracer", "Task", "TerminalStateError", "TickingElement",
    "TickwellError", "TotalTimeTracer", "World", "build_scenario",
    "build_world", "compare_runs", "load_config", "next_cycle_time",
    "period_of", "run_experiment",
]
