import sys

from rich.console import Console
from rich.text import Text

from l0forge.exceptions import L0ForgeException
from l0forge.utils.cli import EXIT_ERROR, run


def main(argv: list[str] | None = None):
    console = Console(stderr=True)
    try:
        sys.exit(run(argv, console))
    except L0ForgeException as e:
        console.print(Text(str(e), style="bold red"))
        sys.exit(EXIT_ERROR)
    except Exception:
        console.print_exception()
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
