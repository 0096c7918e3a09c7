import json
import os
import logging
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path

import structlog

# Load configuration from config.json (override with PFPOSET_CONFIG)
ROOT_DIR = Path(__file__).resolve().parents[2]
CONFIG_PATH = Path(os.environ.get("PFPOSET_CONFIG", ROOT_DIR / "config.json"))

try:
    with open(CONFIG_PATH, 'r') as f:
        CONFIG = json.load(f)
except FileNotFoundError:
    # Logger not yet configured, so use print
    print(f"{CONFIG_PATH} not found")
    raise
except json.JSONDecodeError:
    print(f"Invalid JSON in {CONFIG_PATH}")
    raise

logging_config = CONFIG.get('logging', {})
log_level = getattr(logging, logging_config.get('level', 'INFO').upper(), logging.INFO)
console_level = getattr(logging, logging_config.get('console_level', 'WARNING').upper(), logging.WARNING)
log_format = logging_config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
rotating_config = logging_config.get('rotating_file_handler', {})


def _rotating_handler(path: str) -> TimedRotatingFileHandler:
    log_path = Path(path)
    if not log_path.is_absolute():
        log_path = ROOT_DIR / log_path
    log_path.parent.mkdir(parents=True, exist_ok=True)
    handler = TimedRotatingFileHandler(
        filename=log_path,
        when=rotating_config.get('when', 'midnight'),
        interval=rotating_config.get('interval', 1),
        backupCount=rotating_config.get('backupCount', 7),
        delay=True
    )
    handler.setFormatter(logging.Formatter(log_format))
    handler.setLevel(log_level)
    return handler


app_log_handler = _rotating_handler(logging_config.get('logpath', 'logs/app.log'))
performance_log_handler = _rotating_handler(logging_config.get('performance_logpath', 'logs/performance.log'))

# stdout carries command output only; the console handler writes to stderr
console_handler = logging.StreamHandler()
console_handler.setLevel(console_level)

logging.basicConfig(
    level=log_level,
    handlers=[app_log_handler, console_handler]
)

# Timings from poset builds, verification suites and requests
performance_logger = logging.getLogger("performance")
performance_logger.setLevel(log_level)
performance_logger.handlers = [performance_log_handler]
performance_logger.propagate = False

structlog.configure(
    processors=[
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.stdlib.add_log_level,
        structlog.processors.JSONRenderer()
    ],
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)

logger = structlog.get_logger(__name__)
logger.debug(
    "Logging configured",
    config=str(CONFIG_PATH),
    level=logging_config.get('level', 'INFO'),
    logpath=logging_config.get('logpath', 'logs/app.log'),
    performance_logpath=logging_config.get('performance_logpath', 'logs/performance.log'),
    when=rotating_config.get('when', 'midnight'),
    backup_count=rotating_config.get('backupCount', 7)
)
