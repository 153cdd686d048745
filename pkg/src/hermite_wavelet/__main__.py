"""``python -m hermite_wavelet``."""

import sys

from .cli import main

sys.exit(main())
