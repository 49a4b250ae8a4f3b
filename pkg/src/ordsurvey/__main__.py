import sys

from ordsurvey.cli import main

sys.exit(main())
