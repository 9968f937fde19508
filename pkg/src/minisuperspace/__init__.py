"""Classical and quantum minisuperspace models: clocks, sheets and Wheeler-DeWitt modes."""

__version__ = "0.1.0"

from .model import MinisuperspaceModel, PhaseState, integrate_trajectory  # noqa: E402,F401
