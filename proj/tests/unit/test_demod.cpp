#include <gtest/gtest.h>

#include "common.hpp"

using namespace hsa;

namespace {

SampledSignal am_tone(double depth, double f_am, double f_c, double rate = 8000.0, double seconds = 1.0) {
    return sample(TimeGrid::seconds(rate, seconds), [&](double t) {
        return (1.0 + depth * std::cos(kTwoPi * f_am * t)) * std::cos(kTwoPi * f_c * t);
    });
}

std::vector<double> am_law(double depth, double f_am, const SampledSignal& x) {
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = 1.0 + depth * std::cos(kTwoPi * f_am * x.time(static_cast<double>(i)));
    return a;
}

double max_rel_err(std::span<const double> est, std::span<const double> ref, IndexRange r) {
    double m = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) m = std::max(m, std::abs(est[i] / ref[i] - 1.0));
    return m;
}

}  // namespace

TEST(IaEst, UnitToneAndScaling) {
    const auto x = testutil::tone(50.0, 1000.0, 1.0);
    const auto a = ia_est(x);
    const auto r = central_range(x.size(), 0.8);
    EXPECT_LE(testutil::max_rel_dev(a, 1.0, r), 0.01);
    const auto x3 = testutil::tone(50.0, 1000.0, 1.0, 3.0);
    const auto a3 = ia_est(x3);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a3[i], 3.0 * a[i], 1e-12);
}

TEST(IaEst, TracksAmLaw) {
    const auto x = am_tone(0.5, 2.0, 50.0, 1000.0);
    EXPECT_LE(max_rel_err(ia_est(x), am_law(0.5, 2.0, x), central_range(x.size(), 0.8)), 0.02);
}

TEST(IterAmRemoval, UnitFmIsUnchanged) {
    const auto x = gen_sin_fm(SinFMParams{}, TimeGrid{});
    const auto f = iter_am_removal(x);
    // b(t) ~ 1 already, or corrected only marginally
    EXPECT_LE(testutil::max_abs_diff(f.s_fm, x.values(), central_range(x.size(), 0.8)), 2e-3);
}

TEST(IterAmRemoval, NormalizesAmFm) {
    const auto x = am_tone(0.5, 2.0, 50.0, 1000.0);
    const auto f = iter_am_removal(x);
    const auto r = central_range(x.size(), 0.8);
    double peak = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) peak = std::max(peak, std::abs(f.s_fm[i]));
    EXPECT_LE(peak, 1.001);

    const auto a = ia_est(x);
    std::vector<double> back(x.size());
    for (std::size_t i = 0; i < back.size(); ++i) back[i] = a[i] * f.s_fm[i];
    EXPECT_LE(testutil::relative_rmse(back, x.values(), r), 0.02);
}

TEST(QuadratureFm, CosineGivesSine) {
    const double w0 = kTwoPi * 20.0;
    const TimeGrid grid{1000.0, 1000, 0.0};
    FMSignal f;
    f.s_fm = sample(grid, [&](double t) { return std::cos(w0 * t); }).values();
    f.sample_rate = grid.sample_rate;
    const auto q = quadrature_fm(f);
    const auto r = central_range(grid.length, 0.8);
    std::vector<bool> flagged(grid.length, false);
    for (auto i : q.interpolated) flagged[i] = true;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (flagged[i]) continue;
        EXPECT_NEAR(q.sigma_fm[i], std::sin(w0 * grid.time(i)), 1e-9) << i;
        EXPECT_NEAR(q.s_fm[i] * q.s_fm[i] + q.sigma_fm[i] * q.sigma_fm[i], 1.0, 1e-6);
    }
    EXPECT_FALSE(q.unstable_times.empty());
}

TEST(QuadratureFm, FlatPeakGivesZero) {
    FMSignal f;
    f.s_fm = {0.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.0, -0.5, -1.0, -0.5, 0.0};
    f.sample_rate = 1.0;
    const auto q = quadrature_fm(f);
    EXPECT_EQ(q.sigma_fm[4], 0.0);
}

TEST(QuadratureFm, Chirp) {
    const TimeGrid grid{8000.0, 8000, 0.0};
    const auto phase = [](double t) { return kTwoPi * (10.0 * t + 20.0 * t * t); };
    FMSignal f;
    f.s_fm = sample(grid, [&](double t) { return std::cos(phase(t)); }).values();
    f.sample_rate = grid.sample_rate;
    const auto q = quadrature_fm(f);
    const auto r = central_range(grid.length, 0.8);
    double se = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        const double d = q.sigma_fm[i] - std::sin(phase(grid.time(i)));
        se += d * d;
    }
    EXPECT_LE(std::sqrt(se / static_cast<double>(r.size())), 1e-3);
}

TEST(ImfDemod, SimpleHarmonic) {
    const auto x = testutil::tone(100.0, 8000.0, 1.0);
    const auto c = imf_demod(x);
    const auto r = central_range(x.size(), 0.8);
    EXPECT_LE(testutil::max_rel_dev(c.ia, 1.0, r), 0.01);
    EXPECT_LE(testutil::max_rel_dev(c.if_, kTwoPi * 100.0, r), 0.01);
    EXPECT_NO_THROW(c.validate());
}

TEST(ImfDemod, QuadratureIdentityOutsideGaps) {
    const auto x = gen_sin_fm(SinFMParams{}, TimeGrid{});
    const auto f = quadrature_fm(iter_am_removal(x));
    std::vector<bool> flagged(x.size(), false);
    for (auto i : f.interpolated) flagged[i] = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (flagged[i]) continue;
        const double s = std::clamp(f.s_fm[i], -1.0, 1.0);
        EXPECT_NEAR(s * s + f.sigma_fm[i] * f.sigma_fm[i], 1.0, 1e-6);
    }
}

TEST(ImfDemod, TriangleHasConstantIaAndArccosIf) {
    const TriangleParams p;
    const TimeGrid grid;
    const auto c = imf_demod(gen_triangle(p, grid));
    const auto truth = triangle_fm_solution(p, grid);
    const auto r = central_range(grid.length, 0.8);
    EXPECT_LE(testutil::max_rel_dev(c.ia, p.amplitude, r), 0.02);
    // segment midpoint of the first falling edge after 0.5 s: t = 0.5 + T/4
    const std::size_t mid = static_cast<std::size_t>(std::llround((0.5 + p.period() / 4.0) * grid.sample_rate));
    EXPECT_NEAR(c.if_[mid] / (2.0 * p.omega0 / kPi), 1.0, 0.02);
    EXPECT_NEAR(truth.if_[mid], 2.0 * p.omega0 / kPi, 1e-9);
}

TEST(ImfDemod, TrianglePhaseAdvancesOneCyclePerPeriod) {
    const TriangleParams p;
    const TimeGrid grid;
    const auto c = imf_demod(gen_triangle(p, grid));
    const auto theta = c.phase();
    const auto period = static_cast<std::size_t>(std::llround(p.period() * grid.sample_rate));
    const auto r = central_range(grid.length, 0.8);
    for (std::size_t i = r.begin; i + period < r.end; i += 37)
        EXPECT_NEAR(theta[i + period] - theta[i], kTwoPi, 1e-2) << i;
}

TEST(ImfDemod, SinusoidalFm) {
    const SinFMParams p;
    const TimeGrid grid;
    const auto c = imf_demod(gen_sin_fm(p, grid));
    const auto truth = sin_fm_solution(p, grid);
    EXPECT_LE(testutil::relative_rmse(c.if_, truth.if_, central_range(grid.length, 0.8)), 0.05);
}

TEST(ImfDemod, DemodThenSynthesizeReproducesImf) {
    const TimeGrid grid;
    std::vector<SampledSignal> corpus{gen_sin_fm(SinFMParams{}, grid), gen_triangle(TriangleParams{}, grid),
                                      am_tone(0.5, 2.0, 100.0), testutil::tone(100.0, 8000.0, 1.0)};
    for (const auto& x : corpus) {
        const auto c = imf_demod(x);
        EXPECT_LE(testutil::relative_rmse(c.projection(), x.values(), central_range(x.size(), 0.8)), 0.02);
    }
}

TEST(ImfDemod, SmoothingIsAMovingAverage) {
    const auto x = gen_sin_fm(SinFMParams{}, TimeGrid{});
    const auto raw = imf_demod(x);
    const auto smooth = imf_demod(x, 1e-3);
    const auto expected = moving_average(raw.if_, 8);
    EXPECT_LE(testutil::max_abs_diff(smooth.if_, expected), 1e-9);
    EXPECT_THROW((void)imf_demod(x, -1.0), ContractError);
}

TEST(ImfDemod, NotSiftableInput) {
    std::vector<double> ramp(100);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    EXPECT_THROW((void)imf_demod(SampledSignal(ramp, 100.0)), NotSiftableError);
}

TEST(GaborDemod, HarmonicCorrespondence) {
    const auto x = testutil::tone(100.0, 8000.0, 1.0);
    const auto c = gabor_as_demod(x);
    const auto r = central_range(x.size(), 0.8);
    EXPECT_LE(testutil::max_rel_dev(c.ia, 1.0, r), 1e-6);
    EXPECT_LE(testutil::max_rel_dev(c.if_, kTwoPi * 100.0, r), 1e-6);
}

TEST(GaborDemod, BedrosianAmTone) {
    const auto x = am_tone(0.5, 2.0, 500.0);
    const auto c = gabor_as_demod(x);
    EXPECT_LE(max_rel_err(c.ia, am_law(0.5, 2.0, x), central_range(x.size(), 0.8)), 0.01);
}

TEST(GaborDemod, TriangleMatchesSeriesAmplitude) {
    const TriangleParams p;
    const TimeGrid grid;
    const auto c = gabor_as_demod(gen_triangle(p, grid));
    const auto hc = triangle_hc_solution(p, grid, 10000);
    EXPECT_LE(testutil::relative_rmse(c.ia, hc.ia, central_range(grid.length, 0.8)), 0.01);
}

TEST(Teager, ToneEnergyIsConstant) {
    const double A = 1.7, w0 = kTwoPi * 100.0;
    const auto x = sample(TimeGrid{8000.0, 8000, 0.0}, [&](double t) { return A * std::cos(w0 * t); });
    const auto psi = teager_energy(x.samples(), 8000.0);
    const auto r = central_range(x.size(), 0.8);
    // central differences turn w0 into sin(w0 h) / h exactly
    const double h = 1.0 / 8000.0, wd = std::sin(w0 * h) / h;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        EXPECT_NEAR(psi[i] / (A * A * wd * wd), 1.0, 1e-9);
        EXPECT_NEAR(psi[i] / (A * A * w0 * w0), 1.0, 1e-2);
    }
}

TEST(TeoDemod, Tone) {
    const double A = 1.7;
    const auto x = testutil::tone(100.0, 8000.0, 1.0, A);
    const auto c = teo_demod(x);
    const auto r = central_range(x.size(), 0.8);
    EXPECT_LE(testutil::max_rel_dev(c.ia, A, r), 0.02);
    EXPECT_LE(testutil::max_rel_dev(c.if_, kTwoPi * 100.0, r), 0.02);
}

TEST(TeoDemod, SlowAmTone) {
    const auto x = am_tone(0.5, 2.0, 100.0);
    const auto c = teo_demod(x);
    EXPECT_LE(max_rel_err(c.ia, am_law(0.5, 2.0, x), central_range(x.size(), 0.8)), 0.05);
}

TEST(TeoDemod, Contracts) {
    EXPECT_THROW((void)teo_demod(SampledSignal({1.0, 2.0, 3.0}, 1.0)), ContractError);
    EXPECT_THROW((void)teo_demod(SampledSignal::zeros(100, 10.0)), NumericError);
}

TEST(Demodulators, AgreeOnTone) {
    const auto x = testutil::tone(100.0, 8000.0, 1.0);
    const auto a = imf_demod(x), b = gabor_as_demod(x), c = teo_demod(x);
    const auto r = central_range(x.size(), 0.8);
    for (std::size_t i = r.begin; i < r.end; ++i) {
        EXPECT_NEAR(a.ia[i] / b.ia[i], 1.0, 0.02);
        EXPECT_NEAR(c.ia[i] / b.ia[i], 1.0, 0.02);
        EXPECT_NEAR(a.if_[i] / b.if_[i], 1.0, 0.02);
        EXPECT_NEAR(c.if_[i] / b.if_[i], 1.0, 0.02);
    }
}
