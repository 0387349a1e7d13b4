import sys

from hardballs.cli import main

sys.exit(main())
