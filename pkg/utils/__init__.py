"""
Utils module initialization
"""

from .utils_logging import setup_logging
from .utils_monitoring import PerformanceTracker

__all__ = [
    'setup_logging',
    'PerformanceTracker',
]
