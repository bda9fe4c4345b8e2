import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import colorama
from colorama import Fore, Style

colorama.init(autoreset=True)

RULE = "=" * 60


class ColoredFormatter(logging.Formatter):
    """Formatter that colors the level name for terminal output."""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA + Style.BRIGHT,
    }

    def format(self, record):
        if record.levelname in self.COLORS:
            record.levelname = f"{self.COLORS[record.levelname]}{record.levelname}{Style.RESET_ALL}"
        return super().format(record)


def format_metric(value: Optional[float]) -> str:
    """Scientific notation for finite values, plain text for None, nan and inf."""
    if value is None:
        return "n/a"
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return f"{value:.3e}"


def _bar(fraction: float, length: int) -> str:
    filled = int(min(max(fraction, 0.0), 1.0) * length)
    return "█" * filled + "░" * (length - filled)


@dataclass
class _Operation:
    total: int
    description: str
    completed: int = 0

    @property
    def current(self) -> int:
        return min(self.completed, self.total)

    @property
    def fraction(self) -> float:
        return self.current / self.total if self.total > 0 else 0.0


class ProgressLogger:
    """
    Renders an experiment run: a banner, numbered steps with a bar, one line
    per λ or n schedule point, and chunk counters for grid work.
    """

    def __init__(self, logger: logging.Logger):
        self.logger = logger
        self._step_count = 0
        self._total_steps = 0
        self._operation_progress: Dict[str, _Operation] = {}

    def _banner(self, emit: Callable[[str], None], color: str, title: str) -> None:
        emit(f"{color}{RULE}{Style.RESET_ALL}")
        emit(f"{color}{title}{Style.RESET_ALL}")
        emit(f"{color}{RULE}{Style.RESET_ALL}")

    @staticmethod
    def _line(icon: str, description: str, details: Optional[str]) -> str:
        message = f"  {icon}{Style.RESET_ALL} {description}"
        if details:
            message += f" {Fore.WHITE}({details}){Style.RESET_ALL}"
        return message

    def start_pipeline(self, kind: str, total_steps: int, config_hash: str = ""):
        """Reset step counting and print the run banner tagged with the short config hash."""
        self._step_count = 0
        self._total_steps = max(total_steps, 1)
        tag = f" [{config_hash[:12]}]" if config_hash else ""
        self._banner(self.logger.info, Fore.BLUE, f"COCYCLE-FORGE {kind.upper()} STARTED{tag}")

    def step(self, description: str, details: Optional[str] = None):
        self._step_count += 1
        bar = _bar(self._step_count / self._total_steps, 20)
        message = (f"{Fore.CYAN}[{self._step_count}/{self._total_steps}]{Style.RESET_ALL} "
                   f"{Fore.GREEN}{bar}{Style.RESET_ALL} {description}")
        if details:
            message += f" {Fore.WHITE}({details}){Style.RESET_ALL}"
        self.logger.info(message)

    def substep(self, description: str, details: Optional[str] = None):
        self.logger.info(self._line(f"{Fore.YELLOW}▶", description, details))

    def success(self, description: str, details: Optional[str] = None):
        self.logger.info(self._line(f"{Fore.GREEN}✓", description, details))

    def warning(self, description: str, details: Optional[str] = None):
        self.logger.warning(self._line(f"{Fore.YELLOW}⚠", description, details))

    def error(self, description: str, details: Optional[str] = None):
        self.logger.error(self._line(f"{Fore.RED}✗", description, details))

    def log_schedule(self, label: str, points: Sequence[float]):
        shown = ", ".join(f"{p:g}" for p in points)
        self.logger.info(f"  {Fore.BLUE}≡{Style.RESET_ALL} {label}: {Fore.WHITE}{shown}{Style.RESET_ALL}")

    def log_schedule_point(self, label: str, value: float, **metrics: Optional[float]):
        """One line per schedule point, e.g. `λ=0.99 residual=1.500e-11 sup_u=2.310e+00`."""
        parts = " ".join(f"{Fore.CYAN}{k}{Style.RESET_ALL}={format_metric(v)}" for k, v in metrics.items())
        self.logger.info(f"    {Fore.YELLOW}•{Style.RESET_ALL} {label}={value:g} {parts}")

    def start_operation(self, operation_name: str, total_items: int, description: Optional[str] = None):
        """Start counting finished chunks of a grid operation."""
        op = _Operation(total=total_items, description=description or operation_name)
        self._operation_progress[operation_name] = op
        self.logger.info(f"  {Fore.BLUE}🔄{Style.RESET_ALL} Starting {op.description} ({total_items} chunks)")

    def update_operation_progress(self, operation_name: str, completed: Optional[int] = None, increment: int = 1):
        op = self._operation_progress.get(operation_name)
        if op is None:
            return
        op.completed = completed if completed is not None else op.completed + increment

        icon = f"{Fore.GREEN}✓" if op.current == op.total else f"{Fore.YELLOW}⏳"
        self.logger.debug(f"  {icon}{Style.RESET_ALL} {op.description}: {Fore.CYAN}{_bar(op.fraction, 15)}"
                          f"{Style.RESET_ALL} {op.current}/{op.total} ({op.fraction * 100:.0f}%)")

    def finish_operation(self, operation_name: str, success: bool = True):
        op = self._operation_progress.pop(operation_name, None)
        if op is None:
            return
        if success:
            self.logger.info(f"  {Fore.GREEN}✅{Style.RESET_ALL} {op.description} completed")
        else:
            self.logger.info(f"  {Fore.RED}❌{Style.RESET_ALL} {op.description} failed")

    def finish_pipeline(self, success: bool = True, anomalies: int = 0):
        if not success:
            self._banner(self.logger.error, Fore.RED, "EXPERIMENT FAILED")
        elif anomalies:
            self._banner(self.logger.warning, Fore.YELLOW, f"EXPERIMENT COMPLETED WITH {anomalies} ANOMALIES")
        else:
            self._banner(self.logger.info, Fore.GREEN, "EXPERIMENT COMPLETED")


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    enable_colors: bool = True
) -> tuple[logging.Logger, ProgressLogger]:
    """
    Configure the `cocycleforge` logger.

    Console output goes to stderr; stdout is left for `cocycle-forge list`.

    Args:
        level: Logging level name; unknown names fall back to INFO
        log_file: Optional file that additionally receives every record
        enable_colors: Color level names on the console

    Returns:
        tuple: (main_logger, progress_logger)
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    logger = logging.getLogger('cocycleforge')
    logger.setLevel(numeric_level)
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    if enable_colors:
        console_handler.setFormatter(ColoredFormatter('%(asctime)s | %(levelname)s | %(name)s | %(message)s',
                                                      datefmt='%H:%M:%S'))
    else:
        console_handler.setFormatter(logging.Formatter('%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
                                                       datefmt='%H:%M:%S'))
    logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'))
        logger.addHandler(file_handler)

    return logger, ProgressLogger(logger)


def get_logger(name: str) -> logging.Logger:
    """Child logger `cocycleforge.<name>`."""
    return logging.getLogger(f'cocycleforge.{name}')
