import itertools
import logging
import threading
from queue import PriorityQueue, Empty
from threading import Thread

l = logging.getLogger(__name__)


class FailedJob:
    def __init__(self, reason):
        self.reason = reason

    def __repr__(self):
        return f"<FailedJob {self.reason!r}>"


_job_counter = itertools.count()


class Job:
    def __init__(self, function, *args, **kwargs):
        self.function = function
        self.args = args
        self.kwargs = kwargs

        self.ret_value = None
        self.finish_event = threading.Event()
        # the queue hands jobs out in submission order
        self._seq = next(_job_counter)

    def execute(self):
        try:
            self.ret_value = self.function(*self.args, **self.kwargs)
        except Exception as e:
            l.debug("job %s failed", self.function.__name__, exc_info=True)
            self.ret_value = FailedJob(e)
        finally:
            self.finish_event.set()

    def __lt__(self, other):
        return self._seq < other._seq


class Scheduler:
    """
    A pool of worker threads consuming jobs, oldest first, from a shared queue. With zero workers
    jobs run inline in the thread that schedules them.
    """

    def __init__(self, num_workers=1, sleep_interval=0.05):
        self.num_workers = max(0, int(num_workers))
        self.sleep_interval = sleep_interval
        self._workers = [Thread(target=self._worker_thread, daemon=True) for _ in range(self.num_workers)]
        self._job_queue = PriorityQueue()
        self._work = False

    def stop_worker_thread(self):
        self._work = False
        for worker in self._workers:
            if worker.is_alive():
                worker.join(timeout=self.sleep_interval * 4)

    def start_worker_thread(self):
        self._work = True
        for worker in self._workers:
            worker.start()

    def __enter__(self):
        self.start_worker_thread()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop_worker_thread()

    def _worker_thread(self):
        while self._work:
            self._complete_a_job(block=True)

    def schedule_job(self, job: Job):
        if not self._workers:
            job.execute()
            return

        self._job_queue.put_nowait(job)

    def _complete_a_job(self, block=False):
        try:
            # the timeout lets idle workers notice stop_worker_thread
            job = self._job_queue.get(block=block, timeout=self.sleep_interval if block else None)
        except Empty:
            return

        job.execute()
