"""Shared store for acceptance verdicts, printed at the end of a pytest run."""

REPORT = {}


def record(key, ok, detail):
    REPORT[key] = (bool(ok), detail)
    print(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
    return bool(ok)
