from concurrent.futures import ProcessPoolExecutor


def pmap(fn, tasks, workers: int):
    """Ordered map, in worker processes when ``workers > 1``."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
