"""Collects one result line per acceptance criterion."""

LINES: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str) -> bool:
    line = f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    LINES[n] = line
    print(line)
    return ok
