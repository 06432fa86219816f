from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

# same examples on every run, so results do not depend on the clock
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")

# --- PDB fixtures ----------------------------------------------------------

def atom_line(serial, name, resname, chain, seq, xyz, *, alt=" ", icode=" ",
              occ=1.0, element=None, record="ATOM") -> str:
    """One fixed-column coordinate record, written independently of the package."""
    element = element or name[0]
    padded = f" {name:<3}" if len(name) < 4 else name
    x, y, z = xyz
    return (f"{record:<6}{serial:>5} {padded}{alt}{resname:>3} {chain}{seq:>4}{icode}   "
            f"{x:>8.3f}{y:>8.3f}{z:>8.3f}{occ:>6.2f}{0.0:>6.2f}          {element:>2}  ")


def pdb_text(residues) -> str:
    """``residues``: iterable of (chain, seq, resname, {atom_name: xyz})."""
    lines = []
    serial = 1
    for chain, seq, resname, atoms in residues:
        for name, xyz in atoms.items():
            lines.append(atom_line(serial, name, resname, chain, seq, xyz))
            serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"


def strand(n_res, *, z=0.0, start_seq=1, rng=None, jitter=0.0, shift=(0.0, 0.0)):
    """Extended backbone with N, CA, C, O per residue; optional random jitter."""
    out = []
    for k in range(n_res):
        x0 = 3.4 * k + shift[0]
        s = 1.0 if k % 2 == 0 else -1.0
        atoms = {
            "N": np.array([x0, 0.0 + shift[1], z]),
            "CA": np.array([x0 + 1.2, 0.8 * s + shift[1], z + 0.25 * s]),
            "C": np.array([x0 + 2.3, 0.1 * s + shift[1], z - 0.2 * s]),
            "O": np.array([x0 + 2.3, 0.1 * s + shift[1], z + 1.23]),
        }
        if rng is not None and jitter:
            atoms = {a: p + rng.normal(scale=jitter, size=3) for a, p in atoms.items()}
        out.append((start_seq + k, {a: tuple(float(c) for c in p) for a, p in atoms.items()}))
    return out


def fibril_text(n_layers=5, n_res=12, spacing=4.8, seed=0, jitter=0.15,
                chain_ids="ABCDEFGHIJ") -> str:
    rng = np.random.default_rng(seed)
    residues = []
    for layer in range(n_layers):
        for seq, atoms in strand(n_res, z=spacing * layer, rng=rng, jitter=jitter):
            residues.append((chain_ids[layer], seq, "GLY", atoms))
    return pdb_text(residues)


@pytest.fixture
def fibril_pdb(tmp_path):
    path = tmp_path / "fibril.pdb"
    path.write_text(fibril_text())
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance report -----------------------------------------------------

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when != "call" and not (report.skipped or report.failed):
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "status": [], "detail": []})
    if report.skipped:
        entry["status"].append("SKIP")
    elif report.failed:
        entry["status"].append("FAIL")
    elif report.when == "call":
        entry["status"].append("PASS")
    entry["detail"] += [v for k, v in item.user_properties if k == "detail" and report.when == "call"]


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        statuses = entry["status"]
        if "FAIL" in statuses:
            status = "FAIL"
        elif "PASS" in statuses:
            status = "PASS"
        else:
            status = "SKIP"
        detail = "; ".join(dict.fromkeys(entry["detail"]))
        line = f"[{number:>2}] {status:<4} {entry['title']}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
