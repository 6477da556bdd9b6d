import sys

from hdwhite.cli import main

sys.exit(main())
