import sys

from subsystem_codes.cli import main

sys.exit(main())
