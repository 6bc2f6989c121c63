import sys

from uiroutines.cli import main

sys.exit(main())
