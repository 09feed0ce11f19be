import logging
from collections import defaultdict
from typing import Any, Callable, Dict, List

logger = logging.getLogger(__name__)


class EventEmitter:
    """
    Simple event emitter in the style of Node.js EventEmitter.

    Listeners run synchronously in registration order; a failing listener is
    logged and does not stop the others or the emitting code.
    """

    def __init__(self):
        """Initialize with an empty dictionary of event listeners"""
        self._events: Dict[str, List[Callable[..., Any]]] = defaultdict(list)

    def on(self, event_name: str, listener: Callable[..., Any]) -> None:
        """Register an event listener"""
        self._events[event_name].append(listener)

    def emit(self, event_name: str, *args) -> None:
        """Emit an event with arguments to all registered listeners"""
        for listener in list(self._events.get(event_name, [])):
            try:
                listener(*args)
            except Exception as e:
                logger.error(f"Error in listener for event '{event_name}': {str(e)}")
