"""Main application entry point: `python main.py <verb> ...`"""

import sys
import logging

from src.config import Config
from src.cli import parse_and_dispatch

# Configure logging; stdout is reserved for summaries and witness JSON
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr
)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    try:
        sys.exit(parse_and_dispatch(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n\n👋 Interrupted", file=sys.stderr)
        sys.exit(130)
