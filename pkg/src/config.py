"""Configuration management for the finite-sums toolkit"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Application configuration"""

    VERSION = '0.3.0'

    # Search limits
    FS_LENGTH_CAP = int(os.getenv('FSR_LENGTH_CAP', '22'))
    DEFAULT_BUDGET = int(os.getenv('FSR_DEFAULT_BUDGET', '200000'))
    IDEMPOTENT_BOUND = int(os.getenv('FSR_IDEMPOTENT_BOUND', '1000000'))
    MAX_BLOCK = int(os.getenv('FSR_MAX_BLOCK', '3'))

    # Horizons
    DEFAULT_HORIZON = int(os.getenv('FSR_DEFAULT_HORIZON', '100'))
    TAIL_HORIZON_CAP = int(os.getenv('FSR_TAIL_HORIZON_CAP', '512'))
    STABILITY_WINDOW = int(os.getenv('FSR_STABILITY_WINDOW', '3'))

    # Finite carriers
    IDEAL_CARRIER_CAP = int(os.getenv('FSR_IDEAL_CARRIER_CAP', '16'))
    MAX_CAYLEY_ORDER = int(os.getenv('FSR_MAX_CAYLEY_ORDER', '4'))

    # Runtime
    WORKERS = int(os.getenv('FSR_WORKERS', '1'))
    SEED = int(os.getenv('FSR_SEED', '0'))
    LOG_LEVEL = os.getenv('FSR_LOG_LEVEL', 'INFO').upper()

    @classmethod
    def validate(cls):
        """Validate numeric ranges"""
        positive = [
            'FS_LENGTH_CAP', 'DEFAULT_BUDGET', 'IDEMPOTENT_BOUND',
            'MAX_BLOCK', 'DEFAULT_HORIZON', 'TAIL_HORIZON_CAP', 'STABILITY_WINDOW',
            'IDEAL_CARRIER_CAP', 'MAX_CAYLEY_ORDER', 'WORKERS',
        ]
        bad = [key for key in positive if getattr(cls, key) < 1]

        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            bad.append('LOG_LEVEL')

        if bad:
            raise ValueError(f"Invalid config: {', '.join(bad)}")

        return True

# Validate on import
Config.validate()
