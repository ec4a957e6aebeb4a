"""Check reports returned by the diagnostic operations."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool
    rows: list = field(default_factory=list)
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "rows": self.rows}


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("DENSITYLAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map, parallel up to DENSITYLAB_THREADS workers."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
