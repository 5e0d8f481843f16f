import sys

from .tracer import main

if __name__ == "__main__":
    sys.exit(main())
