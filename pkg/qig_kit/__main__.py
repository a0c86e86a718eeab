import sys

from qig_kit.cli import main

sys.exit(main())
