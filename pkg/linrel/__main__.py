import sys

from linrel.cli import main

sys.exit(main())
