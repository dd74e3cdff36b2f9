import sys

from qjw.cli import main


if __name__ == "__main__":
    sys.exit(main())
