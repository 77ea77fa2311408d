import sys

from heavytail.cli import main

sys.exit(main())
