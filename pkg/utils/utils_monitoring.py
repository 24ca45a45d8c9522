"""
Performance monitoring - wall-clock timing of named sections
"""

import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterator


@dataclass
class SectionTiming:
    calls: int = 0
    items: int = 0
    seconds: float = 0.0
    last_items: int = 0
    last_seconds: float = 0.0


class PerformanceTracker:
    """Accumulates time and item counts per section name"""

    def __init__(self):
        self.sections: Dict[str, SectionTiming] = defaultdict(SectionTiming)

    @contextmanager
    def measure(self, name: str, count: int = 1) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - started
            timing = self.sections[name]
            timing.calls += 1
            timing.items += count
            timing.seconds += elapsed
            timing.last_items = count
            timing.last_seconds = elapsed

    def rate(self, name: str) -> float:
        """Items per second of the most recent measurement"""
        timing = self.sections.get(name)
        if timing is None or timing.last_seconds <= 0.0:
            return 0.0
        return timing.last_items / timing.last_seconds

    def total_rate(self, name: str) -> float:
        timing = self.sections.get(name)
        if timing is None or timing.seconds <= 0.0:
            return 0.0
        return timing.items / timing.seconds

    def summary(self) -> Dict[str, Dict[str, float]]:
        return {
            name: {'calls': t.calls, 'items': t.items, 'seconds': t.seconds,
                   'rate': self.total_rate(name)}
            for name, t in self.sections.items()
        }
