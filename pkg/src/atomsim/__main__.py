from atomsim.cli import main
import sys

sys.exit(main())
