"""
扫描执行器

以 asyncio 工作协程池并发计算扫描网格上的各行，CPU 计算放入线程池，结果按提交顺序返回
"""

import asyncio
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

from dotenv import load_dotenv

from ..utils.config import THREADS_ENV_VAR
from ..utils.logger import LoggerMixin
from .errors import GicBoundsError, SearchError


def resolve_worker_count(requested: Optional[int] = None) -> int:
    """
    计算工作协程数：显式参数优先，其次 GIC_BOUNDS_THREADS，最后 CPU 数；结果限制在 [1, CPU 数]

    Args:
        requested: 显式指定的数量

    Returns:
        不小于 1 的工作数
    """
    load_dotenv()
    cpu = os.cpu_count() or 1
    if requested is None:
        raw = os.getenv(THREADS_ENV_VAR)
        try:
            requested = int(raw) if raw else cpu
        except ValueError:
            requested = cpu
    return max(1, min(cpu, int(requested)))


@dataclass
class SweepTask:
    """扫描任务"""
    index: int
    item: Any
    status: str = "pending"  # pending, running, completed, failed
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    result: Any = None
    error: Optional[BaseException] = None


class SweepExecutor(LoggerMixin):
    """扫描执行器"""

    def __init__(self, handler: Callable[[Any], Any], worker_count: Optional[int] = None):
        self.handler = handler
        self.worker_count = resolve_worker_count(worker_count)

        self.tasks: Dict[int, SweepTask] = {}
        self.task_queue: Optional[asyncio.Queue] = None

        # 运行状态
        self.running = False
        self.workers: List[asyncio.Task] = []
        self._pool: Optional[ThreadPoolExecutor] = None

        # 统计信息
        self.stats = {
            "total_tasks": 0,
            "completed_tasks": 0,
            "failed_tasks": 0,
            "active_tasks": 0
        }

    async def start(self):
        """启动工作协程"""
        if self.running:
            return

        self.task_queue = asyncio.Queue()
        self._pool = ThreadPoolExecutor(max_workers=self.worker_count)
        self.running = True
        for i in range(self.worker_count):
            worker = asyncio.create_task(self._worker(f"worker-{i}"))
            self.workers.append(worker)

        self.logger.debug(f"扫描执行器已启动，工作数: {self.worker_count}")

    async def stop(self):
        """停止工作协程并关闭线程池"""
        if not self.running:
            return

        self.running = False
        for worker in self.workers:
            worker.cancel()

        await asyncio.gather(*self.workers, return_exceptions=True)
        self.workers.clear()

        if self._pool:
            self._pool.shutdown(wait=True)
            self._pool = None

        self.logger.debug("扫描执行器已停止")

    async def submit(self, item: Any) -> int:
        """
        提交一个网格点

        Args:
            item: 交给处理函数的参数

        Returns:
            任务序号
        """
        if not self.running:
            raise SearchError("扫描执行器尚未启动")
        index = len(self.tasks)
        self.tasks[index] = SweepTask(index=index, item=item)
        await self.task_queue.put(index)

        self.stats["total_tasks"] += 1
        self.stats["active_tasks"] += 1
        return index

    async def join(self):
        """等待队列中的任务全部完成"""
        await self.task_queue.join()

    async def run(self, items: List[Any]) -> List[Any]:
        """
        计算全部网格点，结果按提交顺序返回

        Args:
            items: 网格点列表

        Returns:
            结果列表；任一任务失败时抛出其异常
        """
        self.tasks.clear()
        await self.start()
        try:
            for item in items:
                await self.submit(item)
            await self.join()
        finally:
            await self.stop()

        ordered = [self.tasks[index] for index in sorted(self.tasks)]
        failed = [task for task in ordered if task.status == "failed"]
        if failed:
            first = failed[0]
            self.logger.error(f"扫描中 {len(failed)} 个任务失败，首个失败序号 {first.index}: {first.error}")
            if isinstance(first.error, GicBoundsError):
                raise first.error
            raise SearchError(f"扫描任务 {first.index} 失败: {first.error}") from first.error

        return [task.result for task in ordered]

    def run_sync(self, items: List[Any]) -> List[Any]:
        """同步入口"""
        return asyncio.run(self.run(items))

    async def _worker(self, worker_name: str):
        """工作协程"""
        loop = asyncio.get_running_loop()

        while self.running:
            try:
                index = await asyncio.wait_for(self.task_queue.get(), timeout=1.0)
            except asyncio.TimeoutError:
                continue

            task = self.tasks[index]
            try:
                task.status = "running"
                task.started_at = datetime.now()
                task.result = await loop.run_in_executor(self._pool, self.handler, task.item)
                task.status = "completed"
                self.stats["completed_tasks"] += 1
                self.logger.debug(f"任务 {index} 完成 ({worker_name})")
            except Exception as e:
                task.status = "failed"
                task.error = e
                self.stats["failed_tasks"] += 1
                self.logger.warning(f"任务 {index} 失败 ({worker_name}): {e}")
            finally:
                task.completed_at = datetime.now()
                self.stats["active_tasks"] -= 1
                self.task_queue.task_done()

    def get_statistics(self) -> Dict[str, Any]:
        """获取统计信息"""
        return {**self.stats, "worker_count": self.worker_count}
