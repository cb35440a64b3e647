"""python -m hojman 入口"""

import sys

from .cli.main import main

if __name__ == "__main__":
    sys.exit(main())
