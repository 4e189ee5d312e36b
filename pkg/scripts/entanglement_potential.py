"""Log negativity of the split output across input families.

Fock and binomial inputs give entangled outputs; Poisson and thermal inputs
stay at zero up to rounding.  Also reports the largest cutoff used and how
long the sector-wise spectrum took.

    python scripts/entanglement_potential.py --max-fock 8
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from npt_split import make_binomial, make_fock, make_poisson, make_thermal
from npt_split.npt import npt_certificate


@dataclass(frozen=True)
class PotentialConfig:
    max_fock: int = 6
    binomial_M: int = 4
    etas: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    means: tuple[float, ...] = (0.5, 1.0, 2.0, 5.0)


def rows(cfg: PotentialConfig):
    cases = [(f"fock m={m}", make_fock(m)) for m in range(1, cfg.max_fock + 1)]
    cases += [(f"binomial M={cfg.binomial_M} eta={e}", make_binomial(cfg.binomial_M, e)) for e in cfg.etas]
    cases += [(f"poisson mu={x}", make_poisson(x)) for x in cfg.means]
    cases += [(f"thermal nbar={x}", make_thermal(x)) for x in cfg.means]
    for label, pnd in cases:
        t0 = time.perf_counter()
        cert = npt_certificate(pnd)
        ms = 1e3 * (time.perf_counter() - t0)
        yield label, pnd.n_max, cert, ms


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-fock", type=int, default=PotentialConfig.max_fock)
    parser.add_argument("--binomial-M", type=int, default=PotentialConfig.binomial_M)
    args = parser.parse_args()
    cfg = PotentialConfig(max_fock=args.max_fock, binomial_M=args.binomial_M)

    print(f"{'input':<28}{'n_max':>6}{'verdict':>14}{'method':>20}{'min PT eig':>14}{'log neg':>12}{'ms':>9}")
    for label, n_max, cert, ms in rows(cfg):
        method = cert.method.value if cert.method else "-"
        print(f"{label:<28}{n_max:>6}{cert.verdict.value:>14}{method:>20}"
              f"{cert.min_pt_eigenvalue:>14.4g}{cert.log_negativity:>12.5f}{ms:>9.1f}")


if __name__ == "__main__":
    main()
