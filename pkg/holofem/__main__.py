import sys

from holofem.cli import main

sys.exit(main())
