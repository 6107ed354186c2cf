"""Runs the holodyn binary over cases.json and compares stdout with golden files.

usage: run_cli_cases.py HOLODYN DATA_DIR [--update]
"""
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).resolve().parent


def run(binary, data_dir, case):
    return subprocess.run([binary, *case["args"]], cwd=data_dir, capture_output=True, text=True, timeout=300)


def check(binary, data_dir, case, update):
    proc = run(binary, data_dir, case)
    problems = []
    if proc.returncode != case["exit"]:
        problems.append(f"exit {proc.returncode}, expected {case['exit']}: {proc.stderr.strip()}")
    if "stderr" in case and case["stderr"] not in proc.stderr:
        problems.append(f"stderr lacks {case['stderr']!r}: {proc.stderr.strip()}")
    if "error" in case:
        try:
            err = json.loads(proc.stderr.strip().splitlines()[-1])
            if err.get("error") != case["error"]:
                problems.append(f"error kind {err.get('error')}, expected {case['error']}")
        except (ValueError, IndexError):
            problems.append(f"stderr is not a JSON error: {proc.stderr.strip()}")
    if case.get("golden"):
        golden = HERE / "golden" / f"{case['name']}.json"
        if update:
            golden.write_text(proc.stdout)
        elif not golden.exists():
            problems.append(f"missing golden {golden.name}")
        elif golden.read_text() != proc.stdout:
            problems.append(f"stdout differs from {golden.name}")
    return problems


def check_replay(binary, data_dir):
    with tempfile.TemporaryDirectory() as tmp:
        manifest = os.path.join(tmp, "run.json")
        first = subprocess.run([binary, "--manifest", manifest, "orbit", "--input", "attracting_1d.json", "--z0", "0.2"],
                               cwd=data_dir, capture_output=True, text=True)
        again = subprocess.run([binary, "replay", manifest], cwd=data_dir, capture_output=True, text=True)
        m = json.loads(Path(manifest).read_text())
        problems = []
        if first.returncode or again.returncode or first.stdout != again.stdout:
            problems.append("replay output differs")
        for key in ("subcommand", "argv", "parameters", "input_hashes", "tool_version", "wall_time_seconds"):
            if key not in m:
                problems.append(f"manifest lacks {key}")
        return problems


def check_pgm(binary, data_dir):
    with tempfile.TemporaryDirectory() as tmp:
        pgm = os.path.join(tmp, "b.pgm")
        csv = os.path.join(tmp, "b.csv")
        proc = subprocess.run([binary, "basin", "--input", "attracting_1d.json", "--res", "10x6", "--out", pgm, "--csv", csv],
                              cwd=data_dir, capture_output=True, text=True)
        if proc.returncode:
            return [proc.stderr]
        raw = Path(pgm).read_bytes()
        header = b"P5\n10 6\n255\n"
        problems = []
        if not raw.startswith(header) or len(raw) != len(header) + 60:
            problems.append("bad PGM layout")
        rows = Path(csv).read_text().splitlines()
        if rows[0] != "re,im,code,steps" or len(rows) != 61:
            problems.append("bad CSV layout")
        manifest = pgm + ".manifest.json"
        if not Path(manifest).exists():
            return problems + ["no manifest next to the PGM"]
        again = subprocess.run([binary, "replay", manifest], cwd=data_dir, capture_output=True, text=True)
        if again.returncode or Path(pgm).read_bytes() != raw:
            problems.append("replayed PGM differs")
        return problems


def main():
    binary, data_dir = os.path.abspath(sys.argv[1]), sys.argv[2]
    update = "--update" in sys.argv
    failed = 0
    for case in json.loads((HERE / "cases.json").read_text()):
        problems = check(binary, data_dir, case, update)
        print(("ok   " if not problems else "FAIL ") + case["name"])
        for p in problems:
            print("     " + p)
        failed += bool(problems)
    for name, fn in (("replay", check_replay), ("basin_files", check_pgm)):
        problems = fn(binary, data_dir)
        print(("ok   " if not problems else "FAIL ") + name)
        for p in problems:
            print("     " + p)
        failed += bool(problems)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
