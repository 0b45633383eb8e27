#!/usr/bin/env python3
"""Generate data/SYNTH.csv: a seeded synthetic daily OHLC history.

The file reuses the NYSE trading calendar from 2011-10-31 to 2021-11-29
(2537 sessions) so that every command can be exercised end to end without
proprietary market data. Prices are a geometric random walk; they are NOT
real quotes for any listed security.

Requires numpy and pandas_market_calendars.
"""
import argparse

import numpy as np
import pandas_market_calendars as mcal


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/SYNTH.csv")
    ap.add_argument("--seed", type=int, default=2537)
    ap.add_argument("--start", default="2011-10-31")
    ap.add_argument("--end", default="2021-11-29")
    args = ap.parse_args()

    days = mcal.get_calendar("NYSE").valid_days(start_date=args.start, end_date=args.end)
    rng = np.random.default_rng(args.seed)
    n = len(days)

    close = np.empty(n)
    open_ = np.empty(n)
    level = 40.0
    for i in range(n):
        gap = rng.normal(0.0, 0.006)
        open_[i] = level * np.exp(gap)
        level = open_[i] * np.exp(rng.normal(0.0002, 0.022))
        close[i] = level
    wick_hi = np.exp(np.abs(rng.normal(0.0, 0.009, n)))
    wick_lo = np.exp(-np.abs(rng.normal(0.0, 0.009, n)))
    high = np.maximum(open_, close) * wick_hi
    low = np.minimum(open_, close) * wick_lo

    open_, high, low, close = (np.round(a, 2) for a in (open_, high, low, close))
    high = np.maximum.reduce([high, open_, close])
    low = np.minimum.reduce([low, open_, close])
    volume = rng.integers(800_000, 6_000_000, n)

    with open(args.out, "w") as f:
        f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for i, d in enumerate(days):
            f.write(f"{d.date()},{open_[i]:.2f},{high[i]:.2f},{low[i]:.2f},{close[i]:.2f},"
                    f"{close[i]:.2f},{volume[i]}\n")
    print(f"wrote {n} rows to {args.out}")


if __name__ == "__main__":
    main()
