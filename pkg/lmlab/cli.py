"""``lmlab check|flow|examples``: thin aliases over the management commands."""

import os
import sys

SUBCOMMANDS = {
    "check": "lmlab_check",
    "flow": "lmlab_flow",
    "examples": "lmlab_examples",
}


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "lmlab.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    if len(argv) > 1 and argv[1] in SUBCOMMANDS:
        argv[1] = SUBCOMMANDS[argv[1]]
    execute_from_command_line(argv)


if __name__ == "__main__":
    main()
