import sys

from dtforge.cli import main

sys.exit(main())
