import asyncio

class UsheringTo():

    '''
    This class is an asynchronous context manager to provide syntactic sugar to "fork-join" situations,
    where computation must be parallelized across multiple coroutines, and then the results all collected
    at the end.

    The coordinator uses it to run the per-agent solves of one step concurrently, each in a worker thread:

    .. code::

        async def solve_all(jobs):
            result_l = []
            async with UsheringTo(result_l, sort_key=lambda r: r[0], limit=4) as usher:
                for job in jobs:
                    usher += asyncio.to_thread(solve, job)
            return result_l

    Coroutines complete in a non-deterministic order. When ``sort_key`` is given, ``result_l`` is sorted with it
    once every coroutine has finished, so that callers observe the same order regardless of scheduling.

    :param list result_l: A (probably empty) list to which the results from coroutines must be appended.
    :param sort_key: optional key used to order ``result_l`` after the join
    :param int limit: optional cap on the number of coroutines running at the same time
    '''
    def __init__(self, result_l, sort_key=None, limit=None):
        self.result_l                                   = result_l
        self.sort_key                                   = sort_key
        self.limit                                      = limit

        if not limit is None and int(limit) < 1:
            raise ValueError("Concurrency limit must be at least 1, got " + str(limit))

    def __iadd__(self, coro):
        if not asyncio.iscoroutine(coro):
            raise ValueError(f"Expected a coroutine, but instead got a {type(coro)}")
        self.to_do.append(coro)
        return self

    async def __aenter__(self):
        self.to_do                                      = []
        return self

    async def __aexit__(self, exc_type, exc_value, traceback):
        if not exc_type is None:
            for coro in self.to_do:
                coro.close()
            return False

        if self.limit is None:
            pending                                     = self.to_do
        else:
            semaphore                                   = asyncio.Semaphore(int(self.limit))
            pending                                     = [self._bounded(semaphore, coro) for coro in self.to_do]

        to_do_iter                                      = asyncio.as_completed(pending)
        for coro in to_do_iter:
            coro_result                                 = await coro
            self.result_l.append(coro_result)

        if not self.sort_key is None:
            self.result_l.sort(key=self.sort_key)
        return False

    async def _bounded(self, semaphore, coro):
        async with semaphore:
            return await coro
