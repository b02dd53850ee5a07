#!/usr/bin/env python3
"""Regenerate the bundled sample series (nasdaq_2013_2018.csv).

The file is a reconstruction of the NASDAQ Composite's daily closes between
2013-09-16 and 2018-04-16: a NYSE trading-day calendar, geometric
interpolation through the index's major swing points, and seeded AR(1) noise
on the log scale. It is NOT redistributed vendor data; regenerating with the
same seed reproduces the file byte for byte.
"""

import math
import random
from datetime import date, timedelta

ANCHORS = [
    ("2013-09-16", 3718), ("2013-11-29", 4060), ("2013-12-31", 4177),
    ("2014-03-05", 4358), ("2014-04-14", 4023), ("2014-07-03", 4486),
    ("2014-10-15", 4215), ("2014-11-28", 4792), ("2015-03-02", 5008),
    ("2015-05-27", 5107), ("2015-07-20", 5219), ("2015-08-25", 4506),
    ("2015-11-03", 5145), ("2016-02-11", 4266), ("2016-04-19", 4940),
    ("2016-06-27", 4594), ("2016-09-22", 5340), ("2016-12-30", 5383),
    ("2017-03-01", 5904), ("2017-06-08", 6322), ("2017-09-01", 6435),
    ("2017-12-29", 6903), ("2018-01-26", 7506), ("2018-02-08", 6777),
    ("2018-03-12", 7588), ("2018-04-02", 6870), ("2018-04-16", 7156),
]

SEED = 20130916
AR_PHI = 0.85
AR_SIGMA = 0.004


def easter(year):
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return date(year, month, day + 1)


def nth_weekday(year, month, weekday, n):
    d = date(year, month, 1)
    offset = (weekday - d.weekday()) % 7
    return d + timedelta(days=offset + 7 * (n - 1))


def last_weekday(year, month, weekday):
    d = date(year + (month == 12), month % 12 + 1, 1) - timedelta(days=1)
    return d - timedelta(days=(d.weekday() - weekday) % 7)


def observed(d):
    if d.weekday() == 5:
        return d - timedelta(days=1)
    if d.weekday() == 6:
        return d + timedelta(days=1)
    return d


def nyse_holidays(year):
    days = {
        observed(date(year, 1, 1)),
        nth_weekday(year, 1, 0, 3),          # MLK
        nth_weekday(year, 2, 0, 3),          # Washington's Birthday
        easter(year) - timedelta(days=2),    # Good Friday
        last_weekday(year, 5, 0),            # Memorial Day
        observed(date(year, 7, 4)),
        nth_weekday(year, 9, 0, 1),          # Labor Day
        nth_weekday(year, 11, 3, 4),         # Thanksgiving
        observed(date(year, 12, 25)),
    }
    return days


def trading_days(start, end):
    holidays = set()
    for year in range(start.year, end.year + 1):
        holidays |= nyse_holidays(year)
    d = start
    while d <= end:
        if d.weekday() < 5 and d not in holidays:
            yield d
        d += timedelta(days=1)


def main():
    anchors = [(date.fromisoformat(d), v) for d, v in ANCHORS]
    days = list(trading_days(anchors[0][0], anchors[-1][0]))

    # piecewise geometric interpolation through the anchors
    base = []
    ai = 0
    for d in days:
        while ai + 1 < len(anchors) and anchors[ai + 1][0] <= d:
            ai += 1
        if ai + 1 == len(anchors):
            base.append(math.log(anchors[ai][1]))
            continue
        (d0, v0), (d1, v1) = anchors[ai], anchors[ai + 1]
        t = (d - d0).days / (d1 - d0).days
        base.append(math.log(v0) + t * (math.log(v1) - math.log(v0)))

    rng = random.Random(SEED)
    rows = []
    residual = 0.0
    prev_close = None
    for d, log_base in zip(days, base):
        residual = AR_PHI * residual + rng.gauss(0.0, AR_SIGMA)
        close = math.exp(log_base + residual)
        opening = prev_close if prev_close is not None else close * (1 - 0.002)
        spread = abs(rng.gauss(0.004, 0.002))
        high = max(opening, close) * (1 + spread)
        low = min(opening, close) * (1 - spread)
        volume = int(1.9e9 * (1 + 0.25 * rng.gauss(0, 1)))
        rows.append((d, opening, high, low, close, volume))
        prev_close = close

    with open("nasdaq_2013_2018.csv", "w", newline="\n") as out:
        out.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for d, opening, high, low, close, volume in rows:
            out.write(f"{d.isoformat()},{opening:.6f},{high:.6f},{low:.6f},"
                      f"{close:.6f},{close:.6f},{max(volume, 100000)}\n")
    print(f"{len(rows)} trading days written")


if __name__ == "__main__":
    main()
