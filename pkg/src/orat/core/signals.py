import weakref
from collections.abc import Callable
from typing import Any

type _HandlerRef = weakref.WeakMethod | Callable[..., Any]


class Signal:
    """A minimal pub/sub signal for training progress events.

    Bound methods are held through weak references so a subscriber (a progress
    logger, a test collector) never outlives its owner because the trainer still
    holds it.
    """

    def __init__(self) -> None:
        self._handlers: list[_HandlerRef] = []

    @property
    def handler_count(self) -> int:
        return len(self._handlers)

    def connect(self, handler: Callable[..., Any]) -> None:
        """Register a handler; connecting the same handler twice is a no-op."""
        if self._index_of(handler) is not None:
            return

        ref = weakref.WeakMethod(handler) if hasattr(handler, "__self__") else handler
        self._handlers.append(ref)

    def emit(self, *args: Any, **kwargs: Any) -> None:
        """Call every live handler in connection order.

        Handlers whose owner has been garbage collected are dropped.
        """
        live: list[_HandlerRef] = []
        for ref in self._handlers:
            handler = ref() if isinstance(ref, weakref.WeakMethod) else ref
            if handler is None:
                continue

            live.append(ref)
            handler(*args, **kwargs)

        self._handlers = live

    def _index_of(self, handler: Callable[..., Any]) -> int | None:
        for index, ref in enumerate(self._handlers):
            resolved = ref() if isinstance(ref, weakref.WeakMethod) else ref
            if resolved == handler:
                return index

        return None
