import sys

from nematiclab.cli.main import main

sys.exit(main())
