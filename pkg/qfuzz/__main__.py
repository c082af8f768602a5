import sys

from qfuzz.cli import main

sys.exit(main())
