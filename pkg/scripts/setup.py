#!/usr/bin/env python3
"""
Setup script for KoszulLab

Verifies the environment the toolkit needs: Python version, packages,
working directories, the .env file and the recorded instance files.
"""

import os
import sys
import importlib.util
import shutil
from pathlib import Path

# ANSI color codes for terminal output
GREEN = "\033[0;32m"
RED = "\033[0;31m"
YELLOW = "\033[0;33m"
BLUE = "\033[0;34m"
NC = "\033[0m"  # No color

ROOT = Path(__file__).parent.parent

REQUIRED_PACKAGES = ["pandas", "dotenv", "tqdm", "sympy"]

DEFAULT_ENV = """# Coefficient field used when an instance file has no 'char' line
FIELD_CHAR=0
# Prime used by --fast
SPEED_CHAR=32003
# Steps for E-side resolutions (empty: d + 2)
MAX_STEPS=
# Parallel workers for 'verify' (1: thread executor, >1: process pool)
VERIFY_WORKERS=1
LOG_LEVEL=INFO
LOG_DIR=logs
OUTPUT_DIR=outputs
"""


def print_header(text):
    """Print a section header"""
    print(f"\n{BLUE}{'=' * 60}{NC}")
    print(f"{BLUE}# {text}{NC}")
    print(f"{BLUE}{'=' * 60}{NC}")


def print_status(label, status, message=None):
    """Print a status message with color"""
    if status == "OK":
        status_str = f"{GREEN}OK{NC}"
    elif status == "WARNING":
        status_str = f"{YELLOW}WARNING{NC}"
    elif status == "ERROR":
        status_str = f"{RED}ERROR{NC}"
    else:
        status_str = status

    print(f"{label:40} {status_str}")
    if message:
        print(f"  {message}")


def check_python_version():
    """Check if the Python version is supported"""
    version = sys.version_info
    min_version = (3, 9)

    if (version.major, version.minor) < min_version:
        print_status("Python version", "ERROR",
                     f"Python {min_version[0]}.{min_version[1]}+ required, found {version.major}.{version.minor}")
        return False
    print_status("Python version", "OK", f"Python {version.major}.{version.minor}.{version.micro}")
    return True


def check_required_packages():
    """Check for required Python packages"""
    missing = [name for name in REQUIRED_PACKAGES if importlib.util.find_spec(name) is None]
    for name in REQUIRED_PACKAGES:
        if name in missing:
            print_status(f"Package: {name}", "ERROR", "Not installed")
        else:
            print_status(f"Package: {name}", "OK")

    if missing:
        print(f"\n{YELLOW}Some required packages are missing. Run:{NC}")
        print("  pip install -r requirements.txt")
    return not missing


def check_directories():
    """Check for working directories and create them if missing"""
    for dirname in ["logs", "outputs", "instances"]:
        dir_path = ROOT / dirname
        if dir_path.exists():
            print_status(f"Directory: {dirname}", "OK")
        else:
            print_status(f"Directory: {dirname}", "WARNING", "Creating directory")
            dir_path.mkdir(parents=True, exist_ok=True)


def check_env_file():
    """Check for .env file and create it from .env.example if missing"""
    env_path = ROOT / ".env"
    env_example_path = ROOT / ".env.example"

    if env_path.exists():
        print_status("Config: .env file", "OK")
    elif env_example_path.exists():
        print_status("Config: .env file", "WARNING", "Creating .env from .env.example")
        shutil.copy(env_example_path, env_path)
    else:
        print_status("Config: .env file", "WARNING", "Neither .env nor .env.example found, writing defaults")
        env_path.write_text(DEFAULT_ENV)

    char = os.getenv("FIELD_CHAR")
    if char is None:
        from dotenv import dotenv_values

        char = dotenv_values(env_path).get("FIELD_CHAR") or "0"
    try:
        from scripts.exactla import FieldConfig

        FieldConfig(int(char))
        print_status("Config: FIELD_CHAR", "OK", f"characteristic {char}")
    except Exception as e:
        print_status("Config: FIELD_CHAR", "ERROR", str(e))
        return False
    return True


def check_instances():
    """Check the recorded instance files parse"""
    files = sorted((ROOT / "instances").glob("*.ideal"))
    if not files:
        print_status("Instances", "WARNING", "No instance files found")
        return True
    from scripts.instances import InstanceError, load_instance

    ok = True
    for path in files:
        try:
            load_instance(str(path))
            print_status(f"Instance: {path.name}", "OK")
        except InstanceError as e:
            print_status(f"Instance: {path.name}", "ERROR", str(e))
            ok = False
    return ok


def setup_environment():
    """Perform the complete environment setup"""
    print_header("KoszulLab Setup")

    if not check_python_version():
        print(f"\n{RED}Error: Unsupported Python version{NC}")
        print("Please install Python 3.9 or later")
        return False

    check_directories()
    packages_ok = check_required_packages()
    if not packages_ok:
        print_header("Setup Results")
        print(f"{YELLOW}Install the missing packages before running the toolkit.{NC}")
        return False

    env_ok = check_env_file()
    instances_ok = check_instances()

    print_header("Setup Results")
    print(f"\n{BLUE}Next steps:{NC}")
    print("1. Compute a Betti table:")
    print("   python scripts/toolkit.py betti-s instances/rp2_six_vertex.ideal")
    print("2. Compute the linearity defect of an exterior algebra quotient:")
    print("   python scripts/toolkit.py lpd instances/d3_sample.ideal")
    print("3. Run a verification suite:")
    print("   python scripts/toolkit.py verify three-route --d 3 --count 20 --seed 1")
    return env_ok and instances_ok


if __name__ == "__main__":
    sys.path.insert(0, str(ROOT))
    sys.exit(0 if setup_environment() else 1)
