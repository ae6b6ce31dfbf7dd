"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``; the summary appears in
the "acceptance criteria" section at the end of the session.
"""
from dataclasses import replace
from math import sqrt

import numpy as np
import pytest

from conftest import ACCEPTANCE
from ofdm_im_dither.analysis import (
    PepCase,
    average_conditional_pep,
    dither_pep,
    mc_pep_oracle,
    robustness_metric,
    solve_awgn_constraint_levels,
    solve_constraint_levels,
)
from ofdm_im_dither.channel import ChannelRealization, apply_channel, sample_channel
from ofdm_im_dither.cli import main
from ofdm_im_dither.core import SystemConfig, qam_constellation
from ofdm_im_dither.detect import ml_detect
from ofdm_im_dither.dither import ConstraintScheme
from ofdm_im_dither.harness import (
    ExperimentConfig,
    derive_trial_rng,
    run_ber_sweep,
    run_papr_ccdf,
    snr_at_ber,
    transmit,
    with_scheme,
)
from ofdm_im_dither.modem import labels_to_bits

pytestmark = pytest.mark.slow

REFERENCE_RADII = {
    0.1: (0.435, 0.504),
    0.2: (0.480, 0.538),
    0.3: (0.525, 0.571),
    0.4: (0.569, 0.604),
    0.5: (0.614, 0.638),
}
LEVELS = qam_constellation(16).amplitude_levels
SEED = 20191015
BER_SYMBOLS = 200_000  # OFDM symbols per SNR point
PEP_TRIALS = 20_000_000
EB_UNDITHERED = 2.0

PROPOSED = ConstraintScheme.proposed(0.5)
EQUIVALENT = ConstraintScheme.equivalent(0.5)
AWGN_PAPER = ConstraintScheme.awgn_variable((0.2, 1.9, 3.0))


def report(key: str, ok: bool, detail: str):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
    return ok


def _ber_cfg(scheme, grid):
    return with_scheme(ExperimentConfig(snr_grid_db=grid, trials_per_point=BER_SYMBOLS,
                                        master_seed=SEED, chunk_trials=500), scheme)


@pytest.fixture(scope="module")
def ber_runs():
    return {
        "proposed": run_ber_sweep(_ber_cfg(PROPOSED, (20.0, 25.0, 30.0, 35.0))).records,
        "equivalent": run_ber_sweep(_ber_cfg(EQUIVALENT, (20.0, 25.0, 30.0, 35.0))).records,
    }


# 1 -----------------------------------------------------------------------

def test_criterion_01_table_regression(capsys):
    worst = 0.0
    for r0, (r1, r2) in REFERENCE_RADII.items():
        assert main(["solve-constraint", "--scheme", "proposed", "--r0", str(r0),
                     "--precision", "6"]) == 0
        got = [float(v) for v in capsys.readouterr().out.split(",")]
        worst = max(worst, abs(got[0] - r0), abs(got[1] - r1), abs(got[2] - r2))
    ok = worst <= 0.001
    report("1 table regression", ok, f"15 entries, max |error| = {worst:.2e} (tol 1e-3)")
    assert ok


# 2 -----------------------------------------------------------------------

def test_criterion_02_metric_invariance():
    spread = 0.0
    for r0 in REFERENCE_RADII:
        radii = solve_constraint_levels(r0, LEVELS)
        metrics = [robustness_metric(a, r) for a, r in zip(LEVELS, radii)]
        spread = max(spread, max(metrics) - min(metrics))
    ok = spread <= 1e-9
    report("2 metric invariance", ok, f"max spread of (sqrt2 - 2R_j) A_j = {spread:.1e} (tol 1e-9)")
    assert ok


# 3 -----------------------------------------------------------------------

def test_criterion_03_awgn_constraint():
    radii = solve_awgn_constraint_levels(0.2, LEVELS)
    exact = [0.2, sqrt(10) - sqrt(2) + 0.2, sqrt(18) - sqrt(2) + 0.2]
    quoted = [0.2, 1.9, 3.0]
    dev = max(abs(a - b) for a, b in zip(radii, quoted))
    ok = np.allclose(radii, exact, rtol=0, atol=1e-12) and dev <= 0.06
    report("3 awgn constraint", ok,
           f"radii = ({radii[0]:.3f}, {radii[1]:.3f}, {radii[2]:.3f}), "
           f"max deviation from (0.2, 1.9, 3) = {dev:.3f} (tol 0.06)")
    assert ok


# 4 -----------------------------------------------------------------------

@pytest.mark.parametrize("scheme", [ConstraintScheme.none(), PROPOSED], ids=["none", "proposed"])
def test_criterion_04_noiseless_round_trip(scheme):
    cfg = with_scheme(ExperimentConfig(master_seed=SEED), scheme)
    sysc = cfg.system
    rng = derive_trial_rng(SEED, "acceptance-noiseless", 0)
    bits = rng.integers(0, 2, (10_000, sysc.m), dtype=np.uint8)
    H = sample_channel(1, sysc.N, rng, size=10_000)
    errors = 0
    for s in range(0, len(bits), 1000):
        batch, X_tx = transmit(bits[s:s + 1000], cfg)
        Y = apply_channel(X_tx, ChannelRealization(H[s:s + 1000], 0.0))
        sap, labels, _ = ml_detect(Y, H[s:s + 1000], sysc)
        errors += int(np.count_nonzero(labels_to_bits(sap, labels, sysc) != bits[s:s + 1000]))
    ok = errors == 0
    key = "4 noiseless round trip" + ("" if scheme.tag == "none" else " (dithered)")
    report(key, ok, f"{scheme.tag}: {errors} bit errors in 10^4 symbols over flat fading")
    assert ok


# 5 -----------------------------------------------------------------------

@pytest.fixture(scope="module")
def pep_cases():
    out = []
    for snr in (25.0, 30.0):
        n0 = EB_UNDITHERED / 10 ** (snr / 10)
        for R in (0.0, 0.2, 0.5):
            case = PepCase(sqrt(2), sqrt(2), R, n0)
            est = mc_pep_oracle(case, PEP_TRIALS, derive_trial_rng(SEED, f"pep-{snr}-{R}", 0))
            out.append((snr, R, case, est))
    return out


def test_criterion_05_pep_vs_averaged_conditional(pep_cases):
    lines, ok = [], True
    for snr, R, case, est in pep_cases:
        ref = average_conditional_pep(case)
        z = (est.p - ref) / est.stderr
        ok &= abs(z) <= 3
        lines.append(f"{snr:g}dB R={R}: {z:+.2f} SE")
    report("5 pep oracle vs averaged exact conditional", ok, "; ".join(lines))
    assert ok


@pytest.mark.xfail(strict=True, reason="the high-SNR closed form overestimates the true diversity-2 "
                   "Rayleigh PEP by about 2.8x without dither; see the decisions ledger")
def test_criterion_05_pep_vs_high_snr_closed_form(pep_cases):
    lines, ok = [], True
    for snr, R, case, est in pep_cases:
        ratio = dither_pep(case) / est.p
        ok &= 0.5 <= ratio <= 2.0
        lines.append(f"{snr:g}dB R={R}: x{ratio:.2f}")
    report("5 pep oracle vs high-SNR closed form", ok, "closed/MC " + "; ".join(lines) + " (tol x2)")
    assert ok


# 6 -----------------------------------------------------------------------

def test_criterion_06_ber_equivalence(ber_runs):
    s_prop = snr_at_ber(ber_runs["proposed"], 1e-3)
    s_eq = snr_at_ber(ber_runs["equivalent"], 1e-3)
    gap = abs(s_prop - s_eq)
    ok = bool(np.isfinite(gap)) and gap <= 0.5
    report("6 ber equivalence", ok,
           f"Eb/N0 at BER 1e-3: proposed {s_prop:.2f} dB, equivalent {s_eq:.2f} dB, "
           f"gap {gap:.2f} dB (tol 0.5)")
    assert ok


# 7 -----------------------------------------------------------------------

def test_criterion_07_error_floor(ber_runs):
    awgn = run_ber_sweep(_ber_cfg(AWGN_PAPER, (30.0, 35.0))).records
    prop35 = ber_runs["proposed"][-1]
    assert prop35.snr_db == 35.0 and prop35.bit_errors > 0
    excess = awgn[1].ber / prop35.ber
    drop = awgn[0].ber / awgn[1].ber
    ok = excess >= 5 and drop < 2
    report("7 error floor", ok,
           f"awgn-designed BER(35) / proposed BER(35) = {excess:.1f} (need >= 5); "
           f"awgn-designed BER(30)/BER(35) = {drop:.2f} (need < 2)")
    assert ok


# 8 -----------------------------------------------------------------------

def test_criterion_08_ccdf_ordering():
    base = ExperimentConfig(ccdf_symbols=100_000, master_seed=SEED, chunk_trials=1000)
    at = {}
    for name, scheme in (("original", ConstraintScheme.none()), ("equivalent", EQUIVALENT),
                         ("proposed", PROPOSED)):
        values = run_papr_ccdf(with_scheme(base, scheme)).papr_db
        at[name] = float(np.quantile(values, 1 - 1e-2))
    ok = at["proposed"] < at["equivalent"] <= at["original"]
    report("8 ccdf ordering", ok,
           "PAPR at CCDF 1e-2: " + ", ".join(f"{k} {v:.2f} dB" for k, v in at.items()))
    assert ok


# 9 -----------------------------------------------------------------------

def test_criterion_09_diversity_slope():
    rec = run_ber_sweep(_ber_cfg(ConstraintScheme.none(), (20.0, 30.0))).records
    assert rec[1].index_errors > 0 and rec[1].symbol_errors > 0
    idx_slope = np.log10(rec[0].index_error_rate / rec[1].index_error_rate)
    sym_slope = np.log10(rec[0].symbol_error_rate / rec[1].symbol_error_rate)
    ratio = idx_slope / sym_slope
    ok = ratio >= 1.5
    report("9 diversity slope", ok,
           f"index slope {idx_slope:.2f}, symbol slope {sym_slope:.2f} decades/decade, "
           f"ratio {ratio:.2f} (need >= 1.5; {rec[1].index_errors} index errors at 30 dB)")
    assert ok


# 10 ----------------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    common = ["--seed", "99", "--scheme", "proposed", "--r0", "0.5"]
    outputs = {}
    for workers, chunk in ((1, 100), (2, 37), (4, 64)):
        ber = tmp_path / f"ber_{workers}.csv"
        ccdf = tmp_path / f"ccdf_{workers}.csv"
        assert main(["simulate-ber", *common, "--snr", "10:30:10", "--trials", "300",
                     "--workers", str(workers), "--chunk", str(chunk), "--out", str(ber)]) == 0
        assert main(["simulate-papr", *common, "--symbols", "2000",
                     "--workers", str(workers), "--chunk", str(chunk), "--out", str(ccdf)]) == 0
        outputs[workers] = (ber.read_bytes(), ccdf.read_bytes())
    ok = len(set(outputs.values())) == 1
    report("10 determinism", ok, "BER and CCDF CSVs byte-identical for workers 1, 2 and 4")
    assert ok
