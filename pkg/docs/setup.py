"""
Prepares the documentation sources before a Sphinx build.

Every ``dep_local.json`` under ``--start-dir`` lists files to copy next to it
and scripts to run from its directory (e.g., the API reference generator).
"""
from argparse import ArgumentParser
from pathlib import Path

import glob
import json
import os
import runpy
import shutil


def _copies(entry: dict):
    source, target = entry["from"], Path(entry["to"])
    if target.suffix:
        yield Path(source), target
        return

    for path in glob.glob(source, recursive=True):
        if os.path.isfile(path):
            yield Path(path), target / Path(path).name


def prepare(manifest: Path, clean: bool):
    data = json.loads(manifest.read_text(encoding="utf-8"))
    cwd = os.getcwd()
    os.chdir(manifest.parent)
    try:
        for entry in data["copy"]:
            for source, target in _copies(entry):
                if clean:
                    target.unlink(missing_ok=True)
                else:
                    target.parent.mkdir(parents=True, exist_ok=True)
                    shutil.copy2(source, target)

        if not clean:
            for script in data["scripts"]:
                runpy.run_path(script)
    finally:
        os.chdir(cwd)


if __name__ == "__main__":
    parser = ArgumentParser()
    parser.add_argument("--clean", action="store_true", help="Only remove copied files.")
    parser.add_argument("--start-dir", default="./", dest="start_dir", help="Where to look for dep_local.json files.")
    args = parser.parse_args()

    os.chdir(os.path.dirname(os.path.abspath(__file__)))
    for manifest in sorted(Path(args.start_dir).rglob("dep_local.json")):
        prepare(manifest.resolve(), args.clean)
