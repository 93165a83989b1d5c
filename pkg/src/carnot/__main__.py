import sys

from carnot.cli import main

sys.exit(main())
