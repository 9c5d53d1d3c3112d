import sys

from accelseed.cli import main

sys.exit(main())
