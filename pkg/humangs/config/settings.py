from math import comb


class Settings:
    """Application settings"""

    # Brute force (Single-Bounded): work = C(n, k) * n^2 * k
    BRUTE_FORCE_MAX_NODES: int = 14
    BRUTE_FORCE_MAX_WORK: int = comb(14, 4) * 14 * 14 * 4

    # Brute force (Multi-Bounded) enumerates antichains for every question set
    MULTI_BRUTE_FORCE_MAX_NODES: int = 12
    MULTI_BRUTE_FORCE_MAX_K: int = 3

    # Exact Multi worst case and antichain enumeration
    ANTICHAIN_ENUMERATION_LIMIT: int = 16

    # Oracle limits per variant/mode cell
    ORACLE_SINGLE_MAX_NODES: int = 14
    ORACLE_MULTI_MAX_NODES: int = 12
    ORACLE_MULTI_UNLIMITED_MAX_NODES: int = 8

    # Generators
    MAX_GENERATED_NODES: int = 500_000

    # Experiments
    DEFAULT_TRIALS: int = 100
    DEFAULT_RANDOM_RUNS: int = 10
    DEFAULT_PHASES: int = 10
    DEFAULT_SEED: int = 0

    # Interactive sessions
    INTERACT_MAX_RETRIES: int = 3

    # Logging
    LOG_LEVEL: str = "WARNING"


settings = Settings()
