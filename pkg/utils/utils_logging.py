"""
Logging setup for the simulator
Colored console output plus an optional log file
"""

import logging
import sys
from pathlib import Path

import colorlog

import config

PROJECT_LOGGER = 'neuroevo'

CONSOLE_FORMAT = '%(log_color)s%(asctime)s [%(levelname)s]%(reset)s %(name)s: %(message)s'
FILE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red',
}

# marks handlers installed here so a second call can find them
_HANDLER_TAG = '_neuroevo_handler'


def setup_logging(level: str = None, log_file: str = None, enable_file: bool = None) -> logging.Logger:
    """
    Configure the root logger and return the project logger.

    Safe to call more than once: handlers installed by an earlier call are replaced.
    """
    level = (level or config.LOG_LEVEL).upper()
    log_file = log_file or config.LOG_FILE
    enable_file = config.ENABLE_LOGGING if enable_file is None else enable_file

    root = logging.getLogger()
    root.setLevel(level)
    for handler in [h for h in root.handlers if getattr(h, _HANDLER_TAG, False)]:
        root.removeHandler(handler)
        handler.close()

    console = colorlog.StreamHandler(sys.stderr)
    console.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT,
                                                   log_colors=LOG_COLORS))
    setattr(console, _HANDLER_TAG, True)
    root.addHandler(console)

    if enable_file:
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
        except OSError as e:
            root.warning(f"File logging disabled: {e}")
        else:
            file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
            setattr(file_handler, _HANDLER_TAG, True)
            root.addHandler(file_handler)

    return logging.getLogger(PROJECT_LOGGER)
