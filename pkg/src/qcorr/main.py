import logging
import sys

from qcorr.app import run
from qcorr.config import LOG_LEVEL


# Set up logging for the application
logging.basicConfig(level=LOG_LEVEL)
logger = logging.getLogger(__name__)


def main():
    sys.exit(run())


if __name__ == "__main__":
    # Entry point for the application
    main()
