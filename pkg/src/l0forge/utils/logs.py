import logging

from rich.console import Console
from rich.logging import RichHandler

LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def setup_logging(verbosity: int, console: Console) -> None:
    logging.basicConfig(
        level=LEVELS[min(verbosity, len(LEVELS) - 1)],
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )
