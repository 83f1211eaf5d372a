import sys

from modules.controller import controller


def main() -> None:
    sys.exit(controller())


if __name__ == "__main__":
    main()
