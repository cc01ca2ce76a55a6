#!/usr/bin/env python3
import os
import sys
import logging
from dotenv import load_dotenv

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

# Configure logging
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=logging.INFO
)
logger = logging.getLogger(__name__)

def check_packages():
    """Check that the computation and test packages import."""
    try:
        import sympy
        import pytest
        import hypothesis
        logger.info(f"sympy {sympy.__version__}, pytest {pytest.__version__}, hypothesis {hypothesis.__version__}")
        return True
    except ImportError as e:
        logger.error(f"Missing package: {e}")
        return False

def check_configuration():
    """Check that config/config.py loads and holds usable values."""
    try:
        from config.config import DEFAULT_N, DEFAULT_RANK, DEFAULT_MAX_WEIGHT, LOG_FILE
        if DEFAULT_N < 1 or DEFAULT_RANK < 1 or DEFAULT_MAX_WEIGHT < 1:
            logger.error(f"Bad defaults: n={DEFAULT_N}, r={DEFAULT_RANK}, max weight={DEFAULT_MAX_WEIGHT}")
            return False
        logger.info(f"Configuration loaded: n={DEFAULT_N}, r={DEFAULT_RANK}, log file {LOG_FILE}")
        return True
    except (ImportError, ValueError) as e:
        logger.error(f"Failed to load configuration: {e}")
        return False

def check_wheel():
    """Smoke computation: the two-point wheel is -1/12."""
    try:
        from fractions import Fraction
        from configspace import wheel_coefficient
        value = wheel_coefficient(2)
        if value != Fraction(-1, 12):
            logger.error(f"wheel(2) = {value}, expected -1/12")
            return False
        logger.info("wheel(2) = -1/12")
        return True
    except Exception as e:
        logger.error(f"Wheel computation failed: {e}")
        return False

def check_trace():
    """Smoke computation: the trace of the unit chain is r u^n."""
    try:
        from config.config import DEFAULT_N, DEFAULT_RANK
        from cyclic import TensorChain
        from forms import ScalarValue
        from tracemap import universal_trace
        value = universal_trace([], TensorChain.unit(2 * DEFAULT_N, DEFAULT_RANK))
        if value != ScalarValue.constant(DEFAULT_RANK, u=DEFAULT_N):
            logger.error(f"Tr[](1) = {value}, expected {DEFAULT_RANK} u^{DEFAULT_N}")
            return False
        logger.info(f"Tr[](1) = {value}")
        return True
    except Exception as e:
        logger.error(f"Trace computation failed: {e}")
        return False

def main():
    """Run all checks."""
    # Load environment variables
    load_dotenv()

    logger.info("Starting setup checks...")

    packages_ok = check_packages()
    config_ok = check_configuration()
    wheel_ok = check_wheel() if packages_ok else False
    trace_ok = check_trace() if packages_ok and config_ok else False

    # Print summary
    logger.info("--- Check Results ---")
    logger.info(f"Packages: {'OK' if packages_ok else 'FAILED'}")
    logger.info(f"Configuration: {'OK' if config_ok else 'FAILED'}")
    logger.info(f"Wheel coefficient: {'OK' if wheel_ok else 'FAILED'}")
    logger.info(f"Universal trace: {'OK' if trace_ok else 'FAILED'}")

    if packages_ok and config_ok and wheel_ok and trace_ok:
        logger.info("All checks passed.")
        return 0
    logger.info("Some checks failed. See the log above for details.")
    return 1

if __name__ == "__main__":
    sys.exit(main())
