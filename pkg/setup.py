#!/usr/bin/env python3
"""
Setup script for HMC Bench.
This script installs the required dependencies and verifies the setup.
"""

import subprocess
import sys
from pathlib import Path


def run_command(command, description):
    """Run a command and handle errors."""
    print(f"\n{description}...")
    try:
        subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"✓ {description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"✗ {description} failed:")
        print(f"  Error: {e.stderr}")
        return False


def check_python_version():
    """Check if Python version is compatible."""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 9):
        print("✗ Python 3.9 or higher is required")
        return False
    print(f"✓ Python {version.major}.{version.minor}.{version.micro} is compatible")
    return True


def install_dependencies():
    print("\n" + "=" * 50)
    print("Installing Dependencies")
    print("=" * 50)

    requirements_file = Path(__file__).parent / "requirements.txt"
    if not requirements_file.exists():
        print("✗ requirements.txt not found")
        return False
    return run_command(f"{sys.executable} -m pip install -r {requirements_file}", "Installing requirements")


def test_imports():
    """Test if all required modules can be imported."""
    print("\n" + "=" * 50)
    print("Testing Imports")
    print("=" * 50)

    modules_to_test = [
        ("numpy", "NumPy"),
        ("scipy", "SciPy"),
        ("pandas", "pandas"),
        ("tqdm", "tqdm"),
        ("dotenv", "python-dotenv"),
        ("pytest", "pytest"),
    ]

    all_imported = True
    for module, name in modules_to_test:
        try:
            __import__(module)
            print(f"✓ {name} imported successfully")
        except ImportError as e:
            print(f"✗ {name} import failed: {e}")
            all_imported = False
    return all_imported


def verify_gradients():
    """Quick analytic-gradient check of every built-in model."""
    print("\n" + "=" * 50)
    print("Checking Model Gradients")
    print("=" * 50)

    sys.path.insert(0, str(Path(__file__).parent))
    from harness import gradcheck
    from target_models import MODEL_NAMES

    ok = True
    for name in MODEL_NAMES:
        worst = gradcheck(name, count=20)
        if worst < 1e-6:
            print(f"✓ {name}: max relative error {worst:.2e}")
        else:
            print(f"✗ {name}: max relative error {worst:.2e}")
            ok = False
    return ok


def create_output_directory():
    """Create the directory traces and reports are written to."""
    print("\n" + "=" * 50)
    print("Setting up Output Directory")
    print("=" * 50)

    from config import OUTPUT_DIR
    try:
        OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
        print(f"✓ Output directory ready at: {OUTPUT_DIR}")
        return True
    except Exception as e:
        print(f"✗ Failed to create output directory: {e}")
        return False


def main():
    print("HMC Bench Setup Script")
    print("=" * 50)

    if not check_python_version():
        sys.exit(1)

    if not install_dependencies():
        print("\n✗ Setup failed during dependency installation")
        sys.exit(1)

    if not test_imports():
        print("\n✗ Setup failed during import testing")
        sys.exit(1)

    if not verify_gradients():
        print("\n⚠ Warning: some model gradients disagree with finite differences")

    if not create_output_directory():
        print("\n✗ Setup failed during output directory creation")
        sys.exit(1)

    print("\n" + "=" * 50)
    print("✓ Setup completed successfully!")
    print("=" * 50)
    print("\nYou can now run the benchmark with:")
    print("  python main.py run --preset gamma")
    print("\nand the tests with:")
    print("  pytest -m 'not slow'")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (pip install): package metadata lives in pyproject.toml
        from setuptools import setup

        setup()
    else:
        main()
