"""
Progress tracking for sweeps and scenario runs.

Progress bars write to stderr and never influence computed results.
"""
import sys
import threading
from contextlib import contextmanager
from typing import Callable, Iterator, Optional

from tqdm import tqdm


@contextmanager
def sweep_progress(description: str, total: int, enabled: bool = True,
                   unit: str = "cell") -> Iterator[Callable[[int], None]]:
    """Yield a thread-safe ``advance(k)`` callback backed by a tqdm bar."""
    bar = tqdm(
        desc=description,
        total=total,
        unit=unit,
        disable=not enabled,
        file=sys.stderr,
        leave=False,
        bar_format="{l_bar}{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}]",
    )
    lock = threading.Lock()

    def advance(k: int = 1) -> None:
        with lock:
            bar.update(k)

    try:
        yield advance
    finally:
        bar.close()


def show_completion_message(task_name: str, duration_seconds: Optional[float] = None) -> None:
    if duration_seconds:
        print(f"✅ {task_name} complete! ({duration_seconds:.1f}s)")
    else:
        print(f"✅ {task_name} complete!")
