import math

import numpy as np
import pytest

from clocksync import (
    ClockParams,
    DelayModel,
    EstimateReport,
    ParamVector,
    SchedulePlan,
    SingularSystemError,
    TimestampMatrix,
    build_stacked,
    build_timestamp_matrix,
    log_likelihood,
    mle_estimate,
    simulate_cycle,
)


def _system(alpha, beta, d, b=0.2, sigma=0.0, n=10, start=0.0, delta=1.0, seed=0):
    log = simulate_cycle(
        ClockParams(alpha, beta),
        DelayModel(fixed_delay=d, processing_delay=b, noise_std=sigma),
        SchedulePlan(rounds=n, start_time=start, inter_round_interval=delta),
        seed,
    )
    return build_stacked(build_timestamp_matrix(log))


def test_noise_free_hand_system_recovers_truth():
    sys_ = _system(2.0, 1.0, 1.0, b=1.0, n=2, delta=10.0)
    est = mle_estimate(sys_)
    assert est.alpha_hat == pytest.approx(2.0, rel=1e-9)
    assert est.beta_hat == pytest.approx(1.0, rel=1e-9)
    assert est.d_hat == pytest.approx(1.0, rel=1e-9)
    assert est.residual_norm <= 1e-9


def test_noise_free_identity_clock():
    sys_ = _system(1.0, 0.0, 0.0, b=0.0, n=4)
    est = mle_estimate(sys_)
    assert est.alpha_hat == pytest.approx(1.0, rel=1e-9)
    assert abs(est.beta_hat) <= 1e-9
    assert abs(est.d_hat) <= 1e-9


def test_noise_free_exact_recovery_random_params():
    rng = np.random.default_rng(17)
    for _ in range(30):
        alpha = rng.uniform(0.99, 1.01)
        beta = rng.uniform(-10, 10)
        d = rng.uniform(1, 10)
        est = mle_estimate(_system(alpha, beta, d, n=int(rng.integers(2, 40))))
        assert est.alpha_hat == pytest.approx(alpha, rel=1e-9)
        assert est.beta_hat == pytest.approx(beta, rel=1e-9, abs=1e-9)
        assert est.d_hat == pytest.approx(d, rel=1e-9)


def test_consistency_at_large_n():
    est = mle_estimate(_system(1.005, 3.0, 5.0, sigma=1.0, n=10_000, seed=42))
    assert abs(est.alpha_hat - 1.005) <= 1e-3
    assert abs(est.beta_hat - 3.0) <= 0.5


def test_identical_rounds_raise_singular_error():
    m = TimestampMatrix(np.array([[5.0, 6.0, 7.0, 8.0], [5.0, 6.0, 7.0, 8.0]]))
    with pytest.raises(SingularSystemError):
        mle_estimate(build_stacked(m))


def test_method_label_passthrough():
    sys_ = _system(2.0, 1.0, 1.0, b=1.0, n=2, delta=10.0)
    assert mle_estimate(sys_, method="MLE_SVD").method == "MLE_SVD"
    with pytest.raises(ValueError):
        mle_estimate(sys_, method="GRADIENT_DESCENT")


def test_log_likelihood_zero_residual():
    sys_ = _system(2.0, 1.0, 1.0, b=1.0, n=2, delta=10.0)
    value = log_likelihood(sys_, ParamVector(0.5, 0.5, 1.0), sigma2=1.0)
    assert value == 2 * math.log(1.0 / (2.0 * math.pi))


def test_log_likelihood_peaks_at_the_estimate():
    sys_ = _system(1.005, 3.0, 5.0, sigma=1.0, n=40, seed=3)
    est = mle_estimate(sys_)
    psi_hat = ParamVector(
        1.0 / est.alpha_hat, est.beta_hat / est.alpha_hat, est.d_hat
    )
    best = log_likelihood(sys_, psi_hat, sigma2=1.0)
    rng = np.random.default_rng(4)
    for _ in range(100):
        delta = rng.uniform(-1e-3, 1e-3, 3)
        perturbed = ParamVector(
            psi_hat.psi1 + delta[0], psi_hat.psi2 + delta[1], psi_hat.psi3 + delta[2]
        )
        assert best >= log_likelihood(sys_, perturbed, sigma2=1.0)


def test_log_likelihood_sigma_scaling():
    sys_ = _system(1.005, 3.0, 5.0, sigma=1.0, n=25, seed=6)
    psi = ParamVector(1.0 / 1.005, 3.0 / 1.005, 5.0)
    r = sys_.tb - sys_.ta @ psi.as_array()
    rr = float(r @ r)
    n = sys_.n_rounds
    expected = n * math.log(1.0 / (4.0 * math.pi)) - rr / 4.0
    assert log_likelihood(sys_, psi, sigma2=2.0) == pytest.approx(expected, rel=1e-12)


def test_log_likelihood_rejects_bad_sigma():
    sys_ = _system(2.0, 1.0, 1.0, b=1.0, n=2, delta=10.0)
    with pytest.raises(ValueError):
        log_likelihood(sys_, ParamVector(0.5, 0.5, 1.0), sigma2=0.0)


def test_residual_orthogonal_to_design():
    sys_ = _system(1.008, -2.0, 4.0, sigma=1.0, n=60, seed=9)
    est = mle_estimate(sys_)
    psi = np.array([1.0 / est.alpha_hat, est.beta_hat / est.alpha_hat, est.d_hat])
    r = sys_.tb - sys_.ta @ psi
    scale = np.linalg.norm(sys_.ta) * np.linalg.norm(sys_.tb)
    assert np.max(np.abs(sys_.ta.T @ r)) <= 1e-9 * scale


def test_translation_covariance():
    # shifting the B-clock columns by c and the A-clock columns by alpha*c
    # re-expresses the same cycle on a moved schedule: skew, delay, and the
    # residual are untouched while the fitted offset moves by (alpha - alpha_hat)*c
    alpha, c = 1.006, 5000.0
    log = simulate_cycle(
        ClockParams(alpha, 2.0),
        DelayModel(fixed_delay=3.0, processing_delay=0.2, noise_std=1.0),
        SchedulePlan(rounds=30),
        seed=12,
    )
    base = mle_estimate(build_stacked(TimestampMatrix(log.rows)))
    shifted = log.rows + np.array([c, alpha * c, alpha * c, c])
    moved = mle_estimate(build_stacked(TimestampMatrix(shifted)))
    assert moved.alpha_hat == pytest.approx(base.alpha_hat, abs=1e-11)
    assert moved.d_hat == pytest.approx(base.d_hat, abs=1e-11)
    predicted = base.beta_hat + (alpha - base.alpha_hat) * c
    assert moved.beta_hat == pytest.approx(predicted, abs=1e-8)
    assert moved.residual_norm == pytest.approx(base.residual_norm, abs=1e-9)


def test_epoch_scale_times_stay_conditioned():
    # timestamps around 1e9 (seconds-since-epoch scale) must not wreck the
    # solve; the offset tolerance reflects the intercept's 1e9-second lever
    # arm acting on double-precision rounding of the raw timestamps
    est = mle_estimate(_system(1.002, 4.0, 2.0, n=20, start=1.0e9))
    assert est.alpha_hat == pytest.approx(1.002, abs=1e-8)
    assert est.beta_hat == pytest.approx(4.0, abs=1.0)
    assert est.d_hat == pytest.approx(2.0, abs=1e-6)


def test_report_csv_shape():
    assert EstimateReport.csv_header() == "method,alpha_hat,beta_hat,d_hat,residual_norm"
    report = EstimateReport("MLE_RAW", 1.005, 3.0, 5.0, 0.25)
    fields = report.csv_row().split(",")
    assert fields[0] == "MLE_RAW"
    assert [float(v) for v in fields[1:]] == [1.005, 3.0, 5.0, 0.25]


def test_report_rejects_negative_residual():
    with pytest.raises(ValueError):
        EstimateReport("MLE_RAW", 1.0, 0.0, 0.0, -1.0)
