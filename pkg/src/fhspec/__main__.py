import sys

from fhspec.cli import main

sys.exit(main())
