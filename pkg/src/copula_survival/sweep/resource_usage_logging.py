"""
CPU and memory usage logging for the system and the current process during
dependency sweeps.
"""

import logging
import os
from typing import NamedTuple

import psutil

# Retrieve main process logger
logger = logging.getLogger(__name__)

MEGABYTE = 1024 * 1024


class ResourceSnapshot(NamedTuple):
    cpu_percent: float
    process_memory_mb: float
    total_memory_mb: float
    system_memory_percent: float
    available_memory_mb: float

    @property
    def process_memory_percent(self) -> float:
        return 100 * self.process_memory_mb / self.total_memory_mb

    @property
    def available_memory_percent(self) -> float:
        return 100 * self.available_memory_mb / self.total_memory_mb


def get_resource_snapshot(cpu_interval: float = 1.0) -> ResourceSnapshot:
    vm = psutil.virtual_memory()
    process = psutil.Process(os.getpid())

    return ResourceSnapshot(
        cpu_percent=psutil.cpu_percent(interval=cpu_interval),
        process_memory_mb=process.memory_info().rss / MEGABYTE,
        total_memory_mb=vm.total / MEGABYTE,
        system_memory_percent=vm.percent,
        available_memory_mb=vm.available / MEGABYTE,
    )


def get_available_memory_percent() -> float:
    vm = psutil.virtual_memory()

    return 100 * vm.available / vm.total


def indent_log(msg: str, level: int = 0, indent_size: int = 4) -> str:
    return f"{' ' * (level * indent_size)}{msg}"


def log_system_resources(
    indent_level: int = 0, one_line: bool = False
) -> ResourceSnapshot:
    """
    Log current CPU and memory usage for the system and current process.

    Args:
        indent_level (int): The number of indent levels to apply to each log
            line (4 spaces per level). Defaults to 0.
        one_line (bool): If `True`, logs all information in a single line.
            Defaults to `False`.

    Returns:
        ResourceSnapshot: The logged resource usage.
    """
    snapshot = get_resource_snapshot()

    if one_line:
        lines = [
            f"System Resources | CPU: {snapshot.cpu_percent:.2f}% RAM: "
            f"{snapshot.process_memory_mb:.2f}MB "
            f"({snapshot.process_memory_percent:.2f}%) AvailableRAM: "
            f"{snapshot.available_memory_mb:.2f}MB "
            f"({snapshot.available_memory_percent:.2f}%)"
        ]
    else:
        lines = [
            "- System Resources -",
            "-" * 20,
            f"Process CPU usage: {snapshot.cpu_percent:.2f}%",
            f"Process RAM usage: {snapshot.process_memory_mb:.2f} MB "
            f"({snapshot.process_memory_percent:.2f}%)",
            f"Total system RAM usage: {snapshot.total_memory_mb:.2f} MB "
            f"({snapshot.system_memory_percent:.2f}%)",
            f"Available system RAM: {snapshot.available_memory_mb:.2f} MB "
            f"({snapshot.available_memory_percent:.2f}%)",
        ]

    for line in lines:
        logger.info(indent_log(line, level=indent_level))

    return snapshot
