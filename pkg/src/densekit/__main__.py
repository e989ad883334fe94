import sys

from densekit.cli import main

sys.exit(main())
