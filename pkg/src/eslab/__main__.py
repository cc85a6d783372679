import sys

from eslab.cli import main

sys.exit(main())
