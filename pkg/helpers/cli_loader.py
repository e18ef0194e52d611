from contextlib import nullcontext
from typing import ContextManager, Optional

from alive_progress import alive_bar


def load_bar(title: Optional[str] = None, enabled: bool = True) -> ContextManager:
    # Spinner only; machine-readable runs keep stdout clean
    if not enabled:
        return nullcontext()
    return alive_bar(monitor=None, stats=None, title=title)
