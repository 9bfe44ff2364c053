import sys

from medsite.main import main

sys.exit(main())
