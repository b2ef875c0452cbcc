#!/usr/bin/env python3
"""
MAC policy tool.

Thin wrapper so the CLI runs from a checkout without installing:

    python mac_policy_tool.py scenario run biba-org trusted-entity
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from mac_policy.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
