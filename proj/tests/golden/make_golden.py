#!/usr/bin/env python3
"""Regenerate the frozen golden files used by the C++ tests.

Requires numpy, scipy, pandas and statsmodels. Outputs are written next to
this script. Each line is `key v1 v2 ...` with values printed via repr().
"""
import os

import numpy as np
import pandas as pd
from scipy import signal, stats
import statsmodels.api as sm
from statsmodels.formula.api import ols

HERE = os.path.dirname(os.path.abspath(__file__))


def line(key, *values):
    return key + " " + " ".join(repr(float(v)) for v in values) + "\n"


def stats_golden():
    rng = np.random.default_rng(20240611)
    out = []

    a = np.round(rng.normal(10.0, 2.0, 12), 3)
    b = np.round(rng.normal(11.5, 2.5, 12), 3)
    out.append(line("data.a", *a))
    out.append(line("data.b", *b))
    t = stats.ttest_ind(a, b, equal_var=True)
    out.append(line("ttest_unpaired", t.statistic, t.pvalue, len(a) + len(b) - 2))
    t = stats.ttest_rel(a, b)
    out.append(line("ttest_paired", t.statistic, t.pvalue, len(a) - 1))

    groups = [np.round(rng.normal(m, 1.0, 5), 3) for m in (4.0, 5.8, 6.5)]
    for i, g in enumerate(groups):
        out.append(line(f"data.g{i}", *g))
    f = stats.f_oneway(*groups)
    allv = np.concatenate(groups)
    grand = allv.mean()
    ss_b = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ss_t = ((allv - grand) ** 2).sum()
    out.append(line("anova1", f.statistic, f.pvalue, ss_b / ss_t, 2, len(allv) - 3))
    pairs = [(0, 1), (0, 2), (1, 2)]
    for i, j in pairs:
        p = stats.ttest_ind(groups[i], groups[j], equal_var=True).pvalue
        out.append(line(f"bonferroni.{i}{j}", min(1.0, 3 * p)))

    # balanced 2 x 3 design, 4 replicates per cell
    rows = []
    cells = []
    for ia in range(2):
        for ib in range(3):
            v = np.round(rng.normal(5.0 + 0.8 * ia + 0.5 * ib + 0.6 * ia * ib, 1.0, 4), 3)
            cells.append(v)
            out.append(line(f"data.cell{ia}{ib}", *v))
            rows += [{"A": f"a{ia}", "B": f"b{ib}", "y": x} for x in v]
    df = pd.DataFrame(rows)
    model = ols("y ~ C(A) * C(B)", data=df).fit()
    tab = sm.stats.anova_lm(model, typ=2)
    ss_err = tab.loc["Residual", "sum_sq"]
    for key, name in (("C(A)", "A"), ("C(B)", "B"), ("C(A):C(B)", "AB")):
        ss = tab.loc[key, "sum_sq"]
        out.append(line(f"anova2.{name}", tab.loc[key, "F"], tab.loc[key, "PR(>F)"], ss / (ss + ss_err),
                        tab.loc[key, "df"], tab.loc["Residual", "df"]))

    x = np.round(rng.normal(0.0, 1.0, 40), 4)
    out.append(line("data.ks", *x))
    d = stats.kstest(x, "norm", args=(x.mean(), x.std(ddof=1))).statistic
    out.append(line("ks", d, stats.kstwobign.sf(np.sqrt(len(x)) * d)))

    d, a2 = [0.8, 0.9, 0.85], [0.1, 0.2, 0.15]
    t = stats.ttest_ind(d, a2, equal_var=True)
    out.append(line("dominance", t.statistic, t.pvalue))

    with open(os.path.join(HERE, "stats.txt"), "w") as fh:
        fh.writelines(out)

    # fixture result table for the CLI one-way ANOVA smoke test
    mnss = [np.round(rng.normal(m, 1.2, 6), 3) for m in (8.0, 10.0, 9.0)]
    names = ["sham", "fat-c", "for-t"]
    with open(os.path.join(HERE, "mnss_table.csv"), "w") as fh:
        fh.write("# neuroloop-table v1\nsubject,day,group,metric,value,qualifiers\n")
        k = 0
        for name, vals in zip(names, mnss):
            for v in vals:
                fh.write(f"R{k},7,{name},mnss,{float(v)!r},\n")
                k += 1
    f = stats.f_oneway(*mnss)
    with open(os.path.join(HERE, "mnss_expected.txt"), "w") as fh:
        fh.write(line("anova1", f.statistic, f.pvalue))


def signal_golden():
    out = []
    fs = 1000.0
    freqs = np.array([1.0, 2.0, 5.0, 20.0, 49.0, 50.0, 51.0, 80.0, 150.0, 200.0, 300.0, 450.0])
    out.append(line("freqs", *freqs))
    sos = signal.butter(4, [2.0, 200.0], btype="bandpass", fs=fs, output="sos")
    _, h = signal.sosfreqz(sos, worN=freqs, fs=fs)
    out.append(line("bandpass_mag", *np.abs(h)))
    sos = signal.butter(4, [49.0, 51.0], btype="bandstop", fs=fs, output="sos")
    _, h = signal.sosfreqz(sos, worN=freqs, fs=fs)
    out.append(line("bandstop_mag", *np.abs(h)))

    # deterministic test signal: two tones plus a chirp-like term
    n = 4000
    i = np.arange(n)
    x = np.sin(2 * np.pi * 37.0 * i / fs) + 0.5 * np.cos(2 * np.pi * 123.0 * i / fs + 0.3) + 0.2 * np.sin(1e-4 * i * i) + 0.7
    sos = signal.butter(4, [2.0, 200.0], btype="bandpass", fs=fs, output="sos")
    y = signal.sosfiltfilt(sos, x, padtype="odd", padlen=min(n - 1, 1000))
    probe = [0, 1, 10, 500, 1999, 3000, 3998, 3999]
    out.append(line("filtfilt_index", *probe))
    out.append(line("filtfilt_value", *y[probe]))
    for detrend in ("constant", "linear"):
        f, p = signal.welch(x, fs=fs, window="hann", nperseg=1000, noverlap=500, detrend=detrend,
                            scaling="density")
        out.append(line(f"welch_{detrend}", *p))
    with open(os.path.join(HERE, "signal.txt"), "w") as fh:
        fh.writelines(out)


if __name__ == "__main__":
    stats_golden()
    signal_golden()
