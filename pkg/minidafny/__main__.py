import sys

from minidafny.cli.main import main

sys.exit(main())
