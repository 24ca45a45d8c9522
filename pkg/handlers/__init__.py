"""
Handlers module initialization
One module per command
"""

from . import run_handler, sweep_handler, replay_handler

__all__ = [
    'run_handler',
    'sweep_handler',
    'replay_handler',
]
