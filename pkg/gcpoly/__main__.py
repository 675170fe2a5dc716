"""Run the gcpoly command with ``python -m gcpoly``."""

from gcpoly.cli import main

raise SystemExit(main())
