# events/event_bus.py
import logging
from collections import defaultdict
from typing import Any, Callable, DefaultDict, List

logger = logging.getLogger(__name__)

RUN_STARTED = "run_started"
PROGRESS = "progress"
RUN_FINISHED = "run_finished"

Callback = Callable[[Any], None]


class EventBus:
    def __init__(self):
        self._subscribers: DefaultDict[str, List[Callback]] = defaultdict(list)

    def subscribe(self, event_name: str, callback: Callback) -> None:
        """Register a callback for a specific event."""
        self._subscribers[event_name].append(callback)

    def unsubscribe(self, event_name: str, callback: Callback) -> None:
        if callback in self._subscribers.get(event_name, []):
            self._subscribers[event_name].remove(callback)

    def publish(self, event_name: str, data: Any = None) -> None:
        """Notify all subscribers for the event; a failing subscriber does not stop the run."""
        for callback in list(self._subscribers.get(event_name, [])):
            try:
                callback(data)
            except Exception:
                logger.exception("subscriber of %r failed", event_name)


def log_subscriber(bus: EventBus, log: logging.Logger = logger) -> EventBus:
    """Forward run events to a logger"""
    bus.subscribe(RUN_STARTED, lambda d: log.info("run started: %s", d))
    bus.subscribe(PROGRESS, lambda d: log.debug("progress: %s", d))
    bus.subscribe(RUN_FINISHED, lambda d: log.info("run finished: %s", d))
    return bus
