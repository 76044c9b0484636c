import sys

from tropwrap.cli import main

sys.exit(main())
