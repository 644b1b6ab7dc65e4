"""Operation counting for the transforms.

Kernels report the number of inner-loop updates they perform; while an
:class:`OpCounter` is active those counts accumulate on it.

    >>> with OpCounter() as oc:
    ...     decompose(s, level, params)
    >>> oc.total
"""

import threading

_local = threading.local()


class OpCounter:
    def __init__(self):
        self.total = 0
        self.by_stage: dict[str, int] = {}

    def __enter__(self):
        stack = getattr(_local, "stack", None)
        if stack is None:
            stack = _local.stack = []
        stack.append(self)
        return self

    def __exit__(self, *exc):
        _local.stack.pop()
        return False


def add(stage: str, ops: int) -> None:
    for counter in getattr(_local, "stack", ()):
        counter.total += int(ops)
        counter.by_stage[stage] = counter.by_stage.get(stage, 0) + int(ops)
