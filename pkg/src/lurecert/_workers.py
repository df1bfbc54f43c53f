import os


def worker_count() -> int:
    """Worker cap from ``LURECERT_THREADS`` (0 or unset means automatic)."""
    try:
        n = int(os.environ.get("LURECERT_THREADS", "0"))
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n
