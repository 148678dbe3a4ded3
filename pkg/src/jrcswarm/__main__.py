import sys

from jrcswarm.cli import main

sys.exit(main())
