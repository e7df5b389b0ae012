import logging

from rich.console import Console
from rich.logging import RichHandler

from app.config.settings import settings

_configured = False

console = Console(stderr=True)


def configure_logging(level: str | None = None) -> None:
    global _configured
    root = logging.getLogger("hazdep")
    root.setLevel((level or settings.log_level).upper())
    if _configured:
        return
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.propagate = False
    _configured = True


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"hazdep.{name}")
