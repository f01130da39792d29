#!/usr/bin/env python3
# ==============================================================================
# 🔍 Dependency Checker for Eddy-Casimir
# ==============================================================================

import importlib
import importlib.metadata
import sys
from typing import Dict, List, Optional, Tuple

# import name -> (distribution name, what eddy-casimir uses it for)
REQUIRED_PACKAGES = {
    'numpy': ('numpy', 'Arrays, grids, least-squares fits'),
    'scipy': ('scipy', 'Quadrature, special functions, physical constants'),
    'pandas': ('pandas', 'CSV datasets and sweeps'),
    'pydantic': ('pydantic', 'Material, quadrature and run-config models'),
    'click': ('click', 'Command-line interface'),
    'jinja2': ('jinja2', 'CSV headers and acceptance report'),
    'dotenv': ('python-dotenv', 'Settings and key/value run configs'),
    'loguru': ('loguru', 'Logging'),
}

OPTIONAL_PACKAGES = {
    'pytest': ('pytest', 'Test runner'),
}

MIN_PYTHON = (3, 9)


def check_package(import_name: str) -> Tuple[bool, str]:
    """
    Import a package and report its version.

    Returns:
        Tuple of (importable, version or import error text)
    """
    try:
        module = importlib.import_module(import_name)
    except ImportError as e:
        return False, str(e)
    return True, getattr(module, '__version__', 'Unknown version')


def get_pip_version(distribution: str) -> str:
    """Installed distribution version, for packages that are present but fail to import."""
    try:
        return importlib.metadata.version(distribution)
    except importlib.metadata.PackageNotFoundError:
        return "Not found"


def print_section(title: str):
    print(f"\n📦 {title}")
    print("-" * 50)


def check_packages(packages: Dict[str, Tuple[str, str]], title: str) -> Dict[str, bool]:
    """Print one status line per package; returns import name -> importable."""
    print_section(title)
    results = {}
    for name, entry in packages.items():
        distribution, description = entry
        ok, info = check_package(name)
        if ok:
            print(f"✅ {name:<12} {info:<12} - {description}")
        elif get_pip_version(distribution) != "Not found":
            print(f"⚠️  {name:<12} {'Import issue':<12} - {description}")
        else:
            print(f"❌ {name:<12} {'Not installed':<12} - {description}")
        results[name] = ok
    return results


def check_special_functions() -> bool:
    """The thermodynamic kernels need gammaln, digamma and zeta from scipy.special."""
    print_section("SciPy Special Functions")
    try:
        from scipy import special
    except ImportError:
        print("❌ SciPy not installed")
        return False
    missing = [name for name in ('gammaln', 'digamma', 'zeta') if not hasattr(special, name)]
    if missing:
        print(f"❌ scipy.special lacks: {', '.join(missing)}")
        return False
    print("✅ gammaln, digamma and zeta available")
    return True


def install_hint(missing: List[str], packages: Dict[str, Tuple[str, str]]) -> Optional[str]:
    if not missing:
        return None
    return "pip install " + " ".join(packages[name][0] for name in missing)


def main() -> bool:
    print("=" * 70)
    print("🔍 Eddy-Casimir - Dependency Check")
    print("=" * 70)

    print_section("Python Version")
    version = ".".join(map(str, sys.version_info[:3]))
    if sys.version_info[:2] < MIN_PYTHON:
        print(f"❌ Python {version} (requires {MIN_PYTHON[0]}.{MIN_PYTHON[1]}+)")
        return False
    print(f"✅ Python {version}")

    required = check_packages(REQUIRED_PACKAGES, "Required Packages")
    optional = check_packages(OPTIONAL_PACKAGES, "Optional Packages")
    special_ok = check_special_functions()

    print_section("Summary")
    missing = [name for name, ok in required.items() if not ok]
    print(f"Required packages: {len(required) - len(missing)}/{len(required)} installed")
    skipped = [name for name, ok in optional.items() if not ok]
    if skipped:
        print(f"ℹ️  Missing optional packages: {', '.join(skipped)}")
    hint = install_hint(missing, REQUIRED_PACKAGES)
    if hint:
        print(f"\n{hint}\n# or: pip install -r requirements.txt")

    print("\n" + "=" * 70)
    if missing or not special_ok:
        print("❌ Some required dependencies are missing. Please install them before running eddy-casimir.")
        return False
    print("✅ All required dependencies are satisfied!")
    return True


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
