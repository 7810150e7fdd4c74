#!/usr/bin/env python3
# Copyright 2026 The driftforest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the preprocessing fixture and its golden outputs.

raw_fixture.csv   50 per-process rows with junk columns, text status
                  values, mixed label spellings and missing cells
golden_flattened.csv, golden_runs.csv
                  expected output of `preprocess --m-max 8`, computed
                  here without any of the C++ code
"""
import random
from pathlib import Path

FEATURES = [
    "cpu_percent", "cpu_num", "cpu_sys", "cpu_user", "cpu_children_sys",
    "cpu_children_user", "num_threads", "mem_shared", "mem_data", "mem_vms",
    "mem_rss", "mem_dirty", "mem_swap", "mem_lib", "mem_uss", "mem_text",
    "io_write_bytes", "io_read_bytes", "io_write_chars", "io_read_chars",
    "io_write_count", "io_read_count", "kb_sent", "kb_received",
    "ionice_ioclass", "ionice_value", "nice", "ctx_switches_voluntary",
    "ctx_switches_involuntary", "gid_effective", "num_fds", "status",
]
JUNK = ["pid", "ppid", "vm_id", "sample_time", "process_creation_time", "name"]
M_MAX = 8
HERE = Path(__file__).resolve().parent


def fmt(v):
    if v == int(v) and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def main():
    rng = random.Random(20240611)
    snapshots = []  # (exp_no, sample_no, nproc)
    for exp_no in (1, 2):
        for sample_no in (1, 2, 3, 9, 10, 11):
            snapshots.append((exp_no, sample_no))
    # 50 rows over 12 snapshots, no snapshot above M_MAX processes
    counts = [4] * 12
    counts[0] = 6
    counts[7] = 8
    counts[10] = 2
    counts[11] = 2
    assert sum(counts) == 50 and max(counts) <= M_MAX
    hashes = {1: "a1b2c3", 2: "d4e5f6"}

    rows = []
    for (exp_no, sample_no), nproc in zip(snapshots, counts):
        malicious_proc = rng.randrange(nproc) if rng.random() < 0.5 else None
        for p in range(nproc):
            row = {"exp_no": str(exp_no), "sample_no": str(sample_no)}
            values = []
            for name in FEATURES:
                if name == "status":
                    cell = rng.choice(["running", "sleeping", "1", "0", "zombie", ""])
                    value = 1.0 if cell in ("running", "1") else 0.0
                elif rng.random() < 0.06:
                    cell, value = "", 0.0
                elif rng.random() < 0.5:
                    k = rng.randrange(0, 5000)
                    cell, value = str(k), float(k)
                else:
                    v = round(rng.uniform(0, 100), 3)
                    cell, value = fmt(v), v
                row[name] = cell
                values.append(value)
            malicious = p == malicious_proc
            row["label"] = rng.choice(["malicious", "1"] if malicious else ["benign", "0"])
            row["hash"] = hashes[exp_no]
            row["pid"] = str(rng.randrange(100, 9999))
            row["ppid"] = str(rng.randrange(1, 100))
            row["vm_id"] = "vm-" + str(exp_no)
            row["sample_time"] = f"2020-01-0{exp_no} 10:{sample_no:02d}:00"
            row["process_creation_time"] = str(rng.randrange(10**9, 2 * 10**9))
            row["name"] = rng.choice(["svchost.exe", "explorer.exe", "cmd, \"quoted\""])
            rows.append(((exp_no, sample_no), row, values, malicious))

    # interleave snapshots while keeping per-snapshot row order
    order = list(range(len(rows)))
    rng.shuffle(order)
    by_key = {}
    for i in range(len(rows)):
        by_key.setdefault(rows[i][0], []).append(i)
    queues = {k: list(v) for k, v in by_key.items()}
    emitted = []
    for i in order:
        emitted.append(queues[rows[i][0]].pop(0))

    columns = JUNK[:3] + ["sample_no", "label"] + FEATURES[::-1] + ["exp_no", "hash"] + JUNK[3:]

    def quote(cell):
        if "," in cell or '"' in cell:
            return '"' + cell.replace('"', '""') + '"'
        return cell

    lines = [",".join(columns)]
    for i in emitted:
        lines.append(",".join(quote(rows[i][1].get(c, "")) for c in columns))
    (HERE / "raw_fixture.csv").write_text("\n".join(lines) + "\n")

    # golden: snapshots ordered by (exp_no, sample_no) numerically,
    # blocks in file order, zero padding to M_MAX
    ordered_keys = sorted(by_key)
    width = M_MAX * len(FEATURES)
    out = ["timestamp_id,year,label," + ",".join(f"f{i:04d}" for i in range(width))]
    runs = ["timestamp_id,hash"]
    for ts, key in enumerate(ordered_keys):
        members = [i for i in emitted if rows[i][0] == key]
        vec = []
        for i in members:
            vec.extend(rows[i][2])
        vec.extend([0.0] * (width - len(vec)))
        label = 1 if any(rows[i][3] for i in members) else 0
        out.append(f"{ts},,{label}," + ",".join(fmt(v) for v in vec))
        runs.append(f"{ts},{hashes[key[0]]}")
    (HERE / "golden_flattened.csv").write_text("\n".join(out) + "\n")
    (HERE / "golden_runs.csv").write_text("\n".join(runs) + "\n")


if __name__ == "__main__":
    main()
