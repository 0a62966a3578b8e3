import pytest

from ahevdb.bench import (
    linear_fit,
    run_scalar_bench,
    run_scaling_bench,
)
from ahevdb.errors import ValidationError


def test_linear_fit_recovers_an_exact_line():
    slope, intercept, r2 = linear_fit([1, 2, 3, 4], [3.0, 5.0, 7.0, 9.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)


def test_linear_fit_r2_drops_off_the_line():
    _, _, r2 = linear_fit([1, 2, 3, 4], [1.0, 9.0, 2.0, 8.0])
    assert r2 < 0.9


def test_scaling_bench_report_shape():
    report = run_scaling_bench(128, [4, 8, 16], reps=2, seed=41)
    assert report.key_bits == 128
    assert [p.dim for p in report.points] == [4, 8, 16]
    assert all(p.seconds > 0 for p in report.points)
    assert report.t_pcm > 0 and report.t_add > 0 and report.t_dec > 0
    assert report.slope > 0
    assert 0 <= report.r_squared <= 1
    obj = report.to_json()
    assert obj["key_bits"] == 128 and len(obj["seconds"]) == 3


def test_scaling_bench_rejects_bad_dims():
    for dims in ([16], [16, 8], [8, 8], [0, 8], []):
        with pytest.raises(ValidationError):
            run_scaling_bench(128, dims, reps=1)
    with pytest.raises(ValidationError):
        run_scaling_bench(128, [4, 8], reps=0)


def test_scalar_bench_checks_outputs_before_timing():
    points = run_scalar_bench(128, [0, 1, 16], reps=1, seed=43)
    assert [p.exponent for p in points] == [0, 1, 16]
    for p in points:
        assert p.fast_seconds > 0 and p.naive_seconds > 0
        assert p.speedup == pytest.approx(p.naive_seconds / p.fast_seconds)


def test_scalar_bench_large_exponent_favors_square_and_multiply():
    (point,) = run_scalar_bench(128, [4096], reps=1, seed=44)
    assert point.speedup > 5


def test_scalar_bench_rejects_bad_exponents():
    with pytest.raises(ValidationError):
        run_scalar_bench(128, [], reps=1)
    with pytest.raises(ValidationError):
        run_scalar_bench(128, [-1], reps=1)
