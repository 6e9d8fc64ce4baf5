"""
Centralized configuration for the SSBFT consensus harness.

All configuration variables are defined here and can be overridden via environment
variables (or a .env file next to the process working directory). Scenario files
override the simulation defaults per run.
"""
import os
import logging
from dotenv import load_dotenv

# Pick up a local .env before reading any variable
load_dotenv()

# Set up logger
logger = logging.getLogger(__name__)


class Settings:
    """Application settings - all configuration in one place"""

    # ============================================================================
    # SIMULATED NETWORK
    # ============================================================================
    CHANNEL_CAPACITY: int = int(os.getenv("SSBFT_CHANNEL_CAPACITY", "16"))
    # Probability mass given to do-forever iterations when the scheduler picks a step
    TICK_WEIGHT: float = float(os.getenv("SSBFT_TICK_WEIGHT", "0.2"))
    # 0 means n² + n. The world has n² delivery actions plus n ticks, and n² + n
    # distinct actions cannot all be served within n² consecutive steps.
    STARVATION_BOUND: int = int(os.getenv("SSBFT_STARVATION_BOUND", "0"))

    # ============================================================================
    # PROTOCOL DEFAULTS
    # ============================================================================
    ROUND_CAP: int = int(os.getenv("SSBFT_ROUND_CAP", "30"))

    # ============================================================================
    # HARNESS
    # ============================================================================
    STEP_BUDGET: int = int(os.getenv("SSBFT_STEP_BUDGET", "50000"))
    # 0 means 20·n² steps after completion before outcomes are read
    SETTLE_STEPS: int = int(os.getenv("SSBFT_SETTLE_STEPS", "0"))
    SWEEP_WORKERS: int = int(os.getenv("SSBFT_SWEEP_WORKERS", "4"))

    # ============================================================================
    # LOGGING CONFIGURATION
    # ============================================================================
    LOG_LEVEL: str = os.getenv("SSBFT_LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("SSBFT_LOG_DIR", "logs")

    @classmethod
    def settle_steps_for(cls, n: int) -> int:
        """Settle window for an n-node world"""
        return cls.SETTLE_STEPS if cls.SETTLE_STEPS > 0 else 20 * n * n

    @classmethod
    def starvation_bound_for(cls, n: int) -> int:
        """Starvation bound for an n-node world, never below n²"""
        bound = cls.STARVATION_BOUND if cls.STARVATION_BOUND > 0 else n * n + n
        return max(bound, n * n)

    @classmethod
    def validate_settings(cls) -> None:
        """Validate critical settings and log warnings"""
        logger.info("=" * 60)
        logger.info("Configuration Settings Validation")
        logger.info("=" * 60)

        if cls.CHANNEL_CAPACITY < 2:
            logger.warning(f"⚠️  Channel capacity {cls.CHANNEL_CAPACITY} will drop most retransmissions")
        else:
            logger.info(f"✓ Channel capacity: {cls.CHANNEL_CAPACITY}")

        if not 0.0 < cls.TICK_WEIGHT < 1.0:
            logger.warning(f"⚠️  Tick weight {cls.TICK_WEIGHT} starves either deliveries or ticks")
        else:
            logger.info(f"✓ Tick weight: {cls.TICK_WEIGHT}")

        if cls.STEP_BUDGET < 1000:
            logger.warning(f"⚠️  Step budget {cls.STEP_BUDGET} is too small for n ≥ 4")
        else:
            logger.info(f"✓ Step budget: {cls.STEP_BUDGET}")

        if cls.ROUND_CAP < 1:
            logger.warning(f"⚠️  Round cap {cls.ROUND_CAP} makes every binary consensus fail")
        else:
            logger.info(f"✓ Round cap: {cls.ROUND_CAP}")

        logger.info(f"✓ Settle steps: {cls.SETTLE_STEPS or '20·n²'}")
        logger.info(f"✓ Sweep workers: {cls.SWEEP_WORKERS}")
        logger.info("=" * 60)


# Create a singleton instance
settings = Settings()

# Log configuration on module load
logger.debug(f"Configuration module loaded - log level {settings.LOG_LEVEL}")
