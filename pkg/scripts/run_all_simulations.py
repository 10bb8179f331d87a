#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Script to run the desk-scale simulation study in sequence
- calibrate_desk.json: calibrate cutoffs under the all-null scenario
- simulate_desk.json: operating characteristics with the calibrated cutoffs
- m_sensitivity.json: BUPD-D over a grid of prior sample sizes M (calibrates itself)

Usage: python scripts/run_all_simulations.py [OUT_ROOT]
"""
import codecs
import os
import subprocess
import sys

# Set UTF-8 encoding for Windows console
if sys.platform == "win32":
    sys.stdout = codecs.getwriter("utf-8")(sys.stdout.buffer, "strict")
    sys.stderr = codecs.getwriter("utf-8")(sys.stderr.buffer, "strict")

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_DIR = os.path.join(PROJECT_ROOT, "configs")

# Exit code 4 still writes every successful cell
PARTIAL_FAILURE = 4


def run_command(args, description):
    """Run one CLI command and return its exit code."""
    print(f"\n{'='*60}")
    print(f"📋 {description}")
    print(f"{'='*60}")

    env = os.environ.copy()
    env["PYTHONIOENCODING"] = "utf-8"
    cmd = [sys.executable, "-m", "src.main", *args]
    try:
        result = subprocess.run(
            cmd,
            cwd=PROJECT_ROOT,
            check=False,
            capture_output=True,
            text=True,
            encoding="utf-8",
            errors="replace",
            env=env,
        )
    except OSError as e:
        print(f"❌ Error running {' '.join(args[:1])}: {e}", file=sys.stderr)
        return 1

    if result.stdout:
        print(result.stdout)
    if result.stderr:
        print(result.stderr, file=sys.stderr)
    return result.returncode


def main(out_root):
    """Calibrate, then simulate, then run the M sensitivity grid."""
    print("🚀 Starting desk-scale simulation study...")

    calibrate_out = os.path.join(out_root, "calibrate")
    steps = [
        (
            "calibrate",
            "Calibrate cutoffs (desk)",
            ["calibrate", "--config", os.path.join(CONFIG_DIR, "calibrate_desk.json"), "--out", calibrate_out],
        ),
        (
            "simulate",
            "Operating characteristics (desk)",
            [
                "simulate", "--config", os.path.join(CONFIG_DIR, "simulate_desk.json"),
                "--cutoffs", os.path.join(calibrate_out, "cutoffs.json"),
                "--out", os.path.join(out_root, "simulate"),
            ],
        ),
        (
            "m_sensitivity",
            "BUPD-D sensitivity to M (desk)",
            ["simulate", "--config", os.path.join(CONFIG_DIR, "m_sensitivity.json"),
             "--out", os.path.join(out_root, "m_sensitivity")],
        ),
    ]

    results = {}
    for name, description, args in steps:
        code = run_command(args, description)
        results[name] = code
        if code == 0:
            print(f"✅ {description} completed successfully")
        elif code == PARTIAL_FAILURE:
            print(f"⚠️ {description} finished with failed cells")
        else:
            print(f"❌ {description} failed (exit {code})")
            if name == "calibrate":
                print("Skipping the remaining steps: no cutoffs to simulate with")
                break

    # Summary
    print(f"\n{'='*60}")
    print("📊 Summary")
    print(f"{'='*60}")

    for name, code in results.items():
        status = "✅ Success" if code == 0 else f"❌ Exit {code}"
        print(f"{status}: {name}")

    print(f"\n{'='*60}")
    success_count = sum(1 for c in results.values() if c == 0)
    print(f"Total: {success_count}/{len(steps)} steps completed successfully")
    print(f"Outputs under {out_root}")

    return success_count == len(steps)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(PROJECT_ROOT, "runs")
    success = main(os.path.abspath(out))
    sys.exit(0 if success else 1)
