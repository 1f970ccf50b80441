"""
An annotated example showing how to use the rainbow_ttd library.

This script builds a rainbow codebook, runs a short paired TTD/PAA training
comparison and logs the results. It writes no files; see the CLI
(packages/cli) for full experiment runs with CSV and plot artifacts.
"""

import logging
import math

import rainbow_ttd as rt

from rainbow_ttd.config import apply_overrides, load_shipped_config
from rainbow_ttd.exceptions import ConfigurationError, RainbowTTDError


logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
logger = logging.getLogger(__name__)


def main() -> None:
    """
    Show the codebook a TTD array uses and what one training symbol buys.

    Uses the shipped sweep-compare scenario at a reduced trial count.
    Change the overrides to explore other operating points.
    """
    try:
        config = load_shipped_config("sweep-compare")
        config = apply_overrides(config, ["trials=50", "link.snr_db=0"])

        # One beam direction per group of R adjacent loaded subcarriers
        book = rt.build_rainbow_taps(
            config.arrays.n_rx,
            config.ofdm.bandwidth_hz,
            config.codebook.diversity,
            loaded_count=config.ofdm.loaded_count,
            m_total=config.ofdm.m_total,
            carrier_hz=config.arrays.carrier_hz,
        )
        angles = [round(math.degrees(a), 1) for a in book.direction_angles()]
        logger.info("D=%d directions: %s", book.direction_count, angles)

        # Both methods see the same truth and channel draw in every trial
        for row in rt.compare_sweeping(config):
            logger.info(
                "%s: %d training symbols, coarse RMSE %.2f deg",
                row.method,
                row.overhead_symbols,
                row.coarse_rmse_deg,
            )

    except ConfigurationError as e:
        logger.exception("Invalid scenario at %s", e.key or "<root>")
    except RainbowTTDError:
        logger.exception("Simulation failed")


if __name__ == "__main__":
    main()
