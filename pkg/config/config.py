import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Algebra size
DEFAULT_N = int(os.getenv('WEYLTRACE_N', '1'))
DEFAULT_RANK = int(os.getenv('WEYLTRACE_RANK', '1'))

# Randomized identity suites
DEFAULT_SEED = int(os.getenv('WEYLTRACE_SEED', '42'))
DEFAULT_MAX_WEIGHT = int(os.getenv('WEYLTRACE_MAX_WEIGHT', '3'))
DEFAULT_CASES = int(os.getenv('WEYLTRACE_CASES', '20'))
MAX_CHAIN_LENGTH = int(os.getenv('WEYLTRACE_MAX_CHAIN_LENGTH', '3'))

# Wheel table
DEFAULT_MAX_K = 8

# Logging
LOG_LEVEL = os.getenv('WEYLTRACE_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('WEYLTRACE_LOG_FILE', 'logs/weyltrace.log')

# Verify suites, in report order
SUITE_NAMES = ['weyl', 'forms', 'cyclic', 'free', 'interacting', 'trace', 'gm']
