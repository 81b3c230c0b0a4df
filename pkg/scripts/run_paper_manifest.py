#!/usr/bin/env python3
"""Run the full scenario manifest and print a one-line verdict per entry.

Usage:
    python scripts/run_paper_manifest.py [manifest.json] [--json]

Defaults to the manifest next to this script.  With --json the raw report
list is printed canonically instead of the table.
"""

import json
import pathlib
import sys
import time

from fmlat.scenarios import canonical_json, load_manifest, run_batch


def main(argv):
    args = [a for a in argv if a != "--json"]
    as_json = "--json" in argv
    path = args[0] if args else str(
        pathlib.Path(__file__).with_name("full_manifest.json")
    )
    entries = load_manifest(path)
    start = time.perf_counter()
    results = run_batch(entries)
    elapsed = time.perf_counter() - start
    if as_json:
        print(canonical_json(results))
        return 0 if all(r["ok"] for r in results) else 2

    width = max(len(str(e.get("id", ""))) for e in entries)
    for res in results:
        if res["ok"]:
            report = res["report"]
            params = json.dumps(report["params"], sort_keys=True)
            conclusion = report["conclusion"]
            print(f"[{res['index']:>2}] {res['id']:<{width}} {params:<18} "
                  f"{conclusion['partner_count_bound']:<3} "
                  f"{conclusion['partner_set']}")
        else:
            print(f"[{res['index']:>2}] {res.get('id')}: ERROR {res['error']}")
    ok = sum(r["ok"] for r in results)
    print(f"{ok}/{len(results)} scenarios succeeded in {elapsed:.1f}s")
    return 0 if ok == len(results) else 2


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
