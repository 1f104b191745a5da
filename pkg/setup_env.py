#!/usr/bin/env python3
"""
Setup script to write sample configuration for chshlab
"""

import os
import sys

ENV_CONTENT = """# chshlab Environment Configuration
# =================================

# Runtime
CHSHLAB_SEED=0
CHSHLAB_LOG_LEVEL=INFO

# Tolerances
CHSHLAB_VALIDATION_TOL=1e-9
CHSHLAB_EQUALITY_TOL=1e-10
CHSHLAB_JORDAN_TOL=1e-7

# Capacity caps
CHSHLAB_EVOLVE_CAP=6
CHSHLAB_DENSE_QUBIT_CAP=12
CHSHLAB_LIVE_QUBIT_CAP=18

# Analysis defaults
CHSHLAB_PROBE_RESTARTS=200
CHSHLAB_KAPPA_STAR=1.0
CHSHLAB_DEFAULT_ROUNDS=64
"""

LAB_CFG_CONTENT = """# Desk-scale protocol parameters, passed with --config
# Keys are case-sensitive: n is Alice's rounds, N the number of sets.
alpha=16
n=10
n_s=10
N=2
m=2
delta=0.25
seed=0
"""


def write_once(path: str, content: str) -> bool:
    """Write `content` to `path` unless the file already exists"""
    if os.path.exists(path):
        print(f"📁 {path} already exists, leaving it alone")
        return True
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(content)
        print(f"✅ Created {path}")
        return True
    except OSError as e:
        print(f"❌ Error creating {path}: {e}")
        return False


if __name__ == "__main__":
    print("🔧 chshlab Environment Setup")
    print("=" * 40)

    ok = write_once(".env", ENV_CONTENT) and write_once("lab.cfg", LAB_CFG_CONTENT)
    if not ok:
        sys.exit(1)
    print("\n📝 Next steps:")
    print("1. Adjust tolerances and caps in .env if needed")
    print("2. Run: python3 -m chshlab.main protocol --config lab.cfg")
    print("3. Run: pytest")
