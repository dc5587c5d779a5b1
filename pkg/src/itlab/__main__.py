import sys

from itlab.cli import main

sys.exit(main())
