#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace qsd;
using qsd_test::full_density_pipeline;

namespace {

QsdConfig small_config(Complex alpha, double t1_sq, double t2_sq, double gamma_sq,
                       const DetectorModel& d1, const DetectorModel& d2, const DetectorModel& d3,
                       int n_max) {
    QsdConfig config;
    config.alpha = alpha;
    config.bs1 = BeamSplitterParams::from_transmittance(t1_sq);
    config.bs2 = BeamSplitterParams::from_transmittance(t2_sq);
    config.source = SpdcParams::from_pair_probability(gamma_sq, 0.0, 2);
    config.d1 = d1, config.d2 = d2, config.d3 = d3;
    config.cutoff = CutoffDim(n_max);
    return config;
}

} // namespace

TEST(DesiredState, VacuumPlusOnePhoton) {
    const Complex alpha(0.6, 0.3);
    const PureState psi = desired_state(alpha, CutoffDim(4));
    const double norm_factor = 1.0 / std::sqrt(1.0 + std::norm(alpha));
    EXPECT_LT(std::abs(psi.amplitudes[0] - norm_factor), 1e-14);
    EXPECT_LT(std::abs(psi.amplitudes[1] - alpha * norm_factor), 1e-14);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
}

TEST(IdealScheme, BalancedSplittersReproduceDesiredState) {
    const Complex alpha(0.9, -0.4);
    const BeamSplitterParams bs = BeamSplitterParams::fifty_fifty();
    const PureState psi =
        ideal_truncated_state(alpha, bs, bs, IdealOutcome::SingleAtD2, CorrectionMode::Auto);
    const PureState want = desired_state(alpha, CutoffDim(2));
    EXPECT_LT((psi.amplitudes - want.amplitudes).norm(), 1e-13);
}

TEST(IdealScheme, OtherOutcomeNeedsSignFlip) {
    const Complex alpha(0.7, 0.0);
    const BeamSplitterParams bs = BeamSplitterParams::fifty_fifty();
    // without correction the one-photon amplitude comes out negated
    const PureState raw =
        ideal_truncated_state(alpha, bs, bs, IdealOutcome::SingleAtD3, CorrectionMode::Off);
    const double norm_factor = 1.0 / std::sqrt(1.0 + std::norm(alpha));
    EXPECT_LT(std::abs(raw.amplitudes[0] - norm_factor), 1e-13);
    EXPECT_LT(std::abs(raw.amplitudes[1] + alpha * norm_factor), 1e-13);
    // the default correction restores the desired state
    const PureState fixed =
        ideal_truncated_state(alpha, bs, bs, IdealOutcome::SingleAtD3, CorrectionMode::Auto);
    const PureState want = desired_state(alpha, CutoffDim(2));
    EXPECT_LT((fixed.amplitudes - want.amplitudes).norm(), 1e-13);
}

TEST(IdealScheme, ComplementaryTransmittanceMakesOtherOutcomeExact) {
    const Complex alpha(0.8, 0.25);
    const BeamSplitterParams bs1 = BeamSplitterParams::from_transmittance(0.3);
    const BeamSplitterParams bs2 = BeamSplitterParams::from_transmittance(0.7);
    EXPECT_NEAR(ideal_fidelity(alpha, bs1, bs2, IdealOutcome::SingleAtD3), 1.0, 1e-12);
}

TEST(IdealScheme, FidelityClosedFormValues) {
    const Complex alpha = std::sqrt(0.5); // |alpha|^2 = 0.5
    const BeamSplitterParams a = BeamSplitterParams::from_transmittance(0.5);
    const BeamSplitterParams b = BeamSplitterParams::from_transmittance(0.8);
    // frozen values from the two-level conditional amplitudes
    EXPECT_NEAR(ideal_fidelity(alpha, a, b, IdealOutcome::SingleAtD2), 25.0 / 27.0, 1e-12);
    EXPECT_NEAR(ideal_fidelity(alpha, b, a, IdealOutcome::SingleAtD2), 8.0 / 9.0, 1e-12);
}

TEST(IdealScheme, EqualTransmittanceGivesUnitFidelity) {
    auto rng = qsd_test::fixed_rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const double t_sq = qsd_test::uniform(rng, 0.05, 0.95);
        const Complex alpha =
            std::polar(qsd_test::uniform(rng, 0.2, 1.5), qsd_test::uniform(rng, 0.0, 6.28));
        const BeamSplitterParams bs = BeamSplitterParams::from_transmittance(t_sq);
        EXPECT_NEAR(ideal_fidelity(alpha, bs, bs, IdealOutcome::SingleAtD2), 1.0, 1e-11);
    }
}

TEST(IdealScheme, SwapSymmetryHoldsAtUnitIntensity) {
    // at |alpha|^2 = 1 the fidelity is symmetric under swapping the two
    // transmittances; away from it the two orderings generally differ
    auto rng = qsd_test::fixed_rng(6);
    const Complex alpha(1.0, 0.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double t1 = qsd_test::uniform(rng, 0.1, 0.9);
        const double t2 = qsd_test::uniform(rng, 0.1, 0.9);
        const BeamSplitterParams a = BeamSplitterParams::from_transmittance(t1);
        const BeamSplitterParams b = BeamSplitterParams::from_transmittance(t2);
        EXPECT_NEAR(ideal_fidelity(alpha, a, b), ideal_fidelity(alpha, b, a), 1e-11);
    }
}

TEST(IdealScheme, DetectionProbability) {
    const BeamSplitterParams bs = BeamSplitterParams::fifty_fifty();
    EXPECT_NEAR(ideal_detection_probability(Complex(1.0, 0.0), bs, bs),
                0.5 * std::exp(-1.0), 1e-14);
    // both outcomes together exhaust the single-photon heralds
    const Complex alpha(0.5, 0.5);
    const BeamSplitterParams c = BeamSplitterParams::from_transmittance(0.35);
    const double p10 = ideal_detection_probability(alpha, bs, c, IdealOutcome::SingleAtD2);
    const double p01 = ideal_detection_probability(alpha, bs, c, IdealOutcome::SingleAtD3);
    const double a_sq = std::norm(alpha);
    EXPECT_NEAR(p10 + p01, std::exp(-a_sq) * (0.5 + 0.5 * a_sq), 1e-13);
}

TEST(IdealScheme, DegenerateSplittingThrows) {
    const Complex alpha(0.5, 0.0);
    const BeamSplitterParams open = BeamSplitterParams::from_transmittance(1.0);
    const BeamSplitterParams closed = BeamSplitterParams::from_transmittance(0.0);
    // both conditional amplitudes vanish: no heralds at all
    EXPECT_THROW(ideal_truncated_state(alpha, open, open, IdealOutcome::SingleAtD2),
                 DegenerateError);
    EXPECT_THROW(ideal_fidelity(alpha, closed, closed, IdealOutcome::SingleAtD2),
                 DegenerateError);
}

TEST(CorrectionRules, DefaultFollowsCountImbalance) {
    EXPECT_FALSE(correction_default(ClickPattern{1, 1, 0}));
    EXPECT_TRUE(correction_default(ClickPattern{1, 0, 1}));
    EXPECT_FALSE(correction_default(ClickPattern{1, 2, 1}));
    EXPECT_TRUE(correction_default(ClickPattern{1, 1, 2}));
    EXPECT_FALSE(correction_default(IdealOutcome::SingleAtD2));
    EXPECT_TRUE(correction_default(IdealOutcome::SingleAtD3));
}

TEST(CorrectionRules, SigmaZFlipsOddLevels) {
    const BasisIndexer indexer(1, CutoffDim(4));
    Vector amps(indexer.dim());
    amps << Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0);
    const PureState flipped = sigma_z_correct(PureState(indexer, amps));
    EXPECT_LT(std::abs(flipped.amplitudes[0] - 0.5), 1e-15);
    EXPECT_LT(std::abs(flipped.amplitudes[1] + 0.5), 1e-15);
    EXPECT_LT(std::abs(flipped.amplitudes[2] - 0.5), 1e-15);
    EXPECT_LT(std::abs(flipped.amplitudes[3] + 0.5), 1e-15);
}

TEST(RealisticPipeline, PerfectDetectorsSinglePairMatchIdealScheme) {
    auto rng = qsd_test::fixed_rng(42);
    const std::vector<double> single_pair = {0.0, 1.0};
    for (int trial = 0; trial < 5; ++trial) {
        QsdConfig config;
        config.alpha =
            std::polar(qsd_test::uniform(rng, 0.4, 1.2), qsd_test::uniform(rng, 0.0, 6.28));
        config.bs1 =
            BeamSplitterParams::from_transmittance(qsd_test::uniform(rng, 0.25, 0.75));
        config.bs2 =
            BeamSplitterParams::from_transmittance(qsd_test::uniform(rng, 0.25, 0.75));
        const DetectorModel perfect = DetectorModel::pndc().idealized();
        config.d1 = perfect, config.d2 = perfect, config.d3 = perfect;
        config.cutoff = CutoffDim(12);
        const TruncationResult result = realistic_truncation_with_source(
            config, ClickPattern{1, 1, 0}, single_pair, CorrectionMode::Auto);
        const PureState ideal = ideal_truncated_state(config.alpha, config.bs1, config.bs2,
                                                      IdealOutcome::SingleAtD2,
                                                      CorrectionMode::Auto, config.cutoff);
        EXPECT_GT(fidelity_to_pure(result.state, ideal), 1.0 - 1e-10);
        EXPECT_NEAR(result.probability_per_pulse,
                    ideal_detection_probability(config.alpha, config.bs1, config.bs2), 1e-10);
    }
}

TEST(RealisticPipeline, MatchesFullDensityReference) {
    auto rng = qsd_test::fixed_rng(314);
    const std::vector<DetectorModel> kinds = {
        DetectorModel::make(DetectorKind::Cpc, 0.6, 2e4, 1e-8),
        DetectorModel::make(DetectorKind::Spc, 0.75, 5e4, 1e-8),
        DetectorModel::make(DetectorKind::Pndc, 0.5, 1e5, 1e-8)};
    const std::vector<ClickPattern> patterns = {
        ClickPattern{1, 1, 0}, ClickPattern{1, 0, 1}, ClickPattern{1, 2, 1}};
    int checked = 0;
    for (const auto& pattern : patterns) {
        for (int trial = 0; trial < 2; ++trial) {
            DetectorModel d2 = kinds[(checked + 1) % 3];
            if (pattern.n2 > 1 && d2.kind == DetectorKind::Cpc)
                d2 = kinds[1]; // a click/no-click counter cannot resolve two photons
            const QsdConfig config = small_config(
                std::polar(qsd_test::uniform(rng, 0.3, 0.55), qsd_test::uniform(rng, 0.0, 6.28)),
                qsd_test::uniform(rng, 0.3, 0.7), qsd_test::uniform(rng, 0.3, 0.7), 0.05,
                kinds[checked % 3], d2, kinds[(checked + 2) % 3], 6);
            ++checked;
            const TruncationResult fast = realistic_truncation(config, pattern);
            const auto reference = full_density_pipeline(config, pattern);
            EXPECT_NEAR(fast.probability_per_pulse, reference.probability,
                        1e-12 + 1e-10 * reference.probability);
            EXPECT_LT((fast.state.matrix - reference.state.matrix).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_EQ(fast.correction_applied, reference.corrected);
        }
    }
    EXPECT_EQ(checked, 6);
}

TEST(RealisticPipeline, PatternProbabilitiesSumToOne) {
    // conditioning outcomes form a complete set, so the pattern
    // probabilities must exhaust every pulse
    QsdConfig config = small_config(std::polar(0.45, 0.8), 0.45, 0.6, 0.05,
                                    DetectorModel::make(DetectorKind::Cpc, 0.55, 3e4, 1e-8),
                                    DetectorModel::make(DetectorKind::Spc, 0.7, 2e4, 1e-8),
                                    DetectorModel::make(DetectorKind::Pndc, 0.6, 1e5, 1e-8),
                                    10);
    double total = 0.0;
    for (const auto& e1 : povm_complete_set(config.d1, config.cutoff))
        for (const auto& e2 : povm_complete_set(config.d2, config.cutoff))
            for (const auto& e3 : povm_complete_set(config.d3, config.cutoff))
                total += pattern_probability(
                    config, ClickPattern{e1.outcome, e2.outcome, e3.outcome});
    EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(RealisticPipeline, ResultBookkeeping) {
    QsdConfig config = QsdConfig::standard();
    config.alpha = Complex(1.0, 0.0);
    const TruncationResult result = realistic_truncation(config, ClickPattern{1, 1, 0});
    EXPECT_FALSE(result.correction_applied);
    EXPECT_NEAR(result.rate_per_second, result.probability_per_pulse * config.rep_rate, 1e-9);
    EXPECT_NEAR(result.probability_per_pulse,
                pattern_probability(config, ClickPattern{1, 1, 0}), 1e-15);
    EXPECT_NEAR(result.state.trace(), 1.0, 1e-12);
    EXPECT_NEAR(detection_rate(result, config), result.rate_per_second, 1e-12);
    EXPECT_NEAR(result.fidelity_to_desired,
                fidelity_to_pure(result.state, desired_state(config.alpha, config.cutoff)),
                1e-13);

    const TruncationResult flipped = realistic_truncation(config, ClickPattern{1, 0, 1});
    EXPECT_TRUE(flipped.correction_applied);
    const TruncationResult forced =
        realistic_truncation(config, ClickPattern{1, 0, 1}, CorrectionMode::Off);
    EXPECT_FALSE(forced.correction_applied);
    EXPECT_GT(flipped.fidelity_to_desired, forced.fidelity_to_desired);
}

TEST(RealisticPipeline, ImpossiblePatternThrowsDegenerate) {
    QsdConfig config = QsdConfig::standard();
    const DetectorModel perfect = DetectorModel::pndc().idealized();
    config.d1 = perfect, config.d2 = perfect, config.d3 = perfect;
    config.cutoff = CutoffDim(12);
    // a perfect herald counter can never see three photons from one pair
    const std::vector<double> single_pair = {0.0, 1.0};
    EXPECT_THROW(realistic_truncation_with_source(config, ClickPattern{3, 0, 0}, single_pair,
                                                  CorrectionMode::Auto),
                 DegenerateError);
}

TEST(RealisticPipeline, OversizedInputThrowsCutoffError) {
    QsdConfig config = QsdConfig::standard();
    config.alpha = Complex(4.0, 0.0);
    config.cutoff = CutoffDim(8);
    EXPECT_THROW(realistic_truncation(config, ClickPattern{1, 1, 0}), CutoffError);
}

TEST(RealisticPipeline, NegativePatternRejected) {
    const QsdConfig config = QsdConfig::standard();
    EXPECT_THROW(realistic_truncation(config, ClickPattern{-1, 1, 0}), UsageError);
}

TEST(Strategies, DetectorAssignments) {
    QsdConfig config = QsdConfig::standard();
    config.d1 = DetectorModel::make(DetectorKind::Cpc, 0.65, 7.0, 2e-8);
    config.d2 = DetectorModel::make(DetectorKind::Cpc, 0.8, 7.0, 3e-8);
    config.d3 = DetectorModel::make(DetectorKind::Cpc, 0.9, 7.0, 4e-8);

    const QsdConfig a = strategy_config(config, Strategy::A);
    EXPECT_EQ(a.d1.kind, DetectorKind::Cpc);
    EXPECT_EQ(a.d2.kind, DetectorKind::Spc);
    EXPECT_EQ(a.d3.kind, DetectorKind::Cpc);
    const QsdConfig b = strategy_config(config, Strategy::B);
    EXPECT_EQ(b.d1.kind, DetectorKind::Cpc);
    EXPECT_EQ(b.d2.kind, DetectorKind::Cpc);
    const QsdConfig c = strategy_config(config, Strategy::C);
    EXPECT_EQ(c.d1.kind, DetectorKind::Spc);
    EXPECT_EQ(c.d2.kind, DetectorKind::Spc);
    const QsdConfig d = strategy_config(config, Strategy::D);
    EXPECT_EQ(d.d1.kind, DetectorKind::Spc);
    EXPECT_EQ(d.d2.kind, DetectorKind::Cpc);

    // kind-characteristic dark rates, preserved efficiencies and windows
    EXPECT_NEAR(a.d2.r_dark, 1e4, 1e-9);
    EXPECT_NEAR(b.d2.r_dark, 100.0, 1e-12);
    EXPECT_NEAR(a.d2.eta, 0.8, 1e-15);
    EXPECT_NEAR(a.d2.tau_res, 3e-8, 1e-20);
    EXPECT_NEAR(d.d1.r_dark, 1e4, 1e-9);

    EXPECT_STREQ(to_string(Strategy::A), "a");
    EXPECT_STREQ(to_string(Strategy::D), "d");
}

TEST(Strategies, RunMatchesExplicitConfiguration) {
    QsdConfig config = QsdConfig::standard();
    config.alpha = Complex(std::sqrt(0.6), 0.0);
    const TruncationResult via_strategy = run_strategy(config, Strategy::C);
    const TruncationResult direct =
        realistic_truncation(strategy_config(config, Strategy::C), ClickPattern{1, 1, 0});
    EXPECT_NEAR(via_strategy.fidelity_to_desired, direct.fidelity_to_desired, 1e-14);
    EXPECT_NEAR(via_strategy.probability_per_pulse, direct.probability_per_pulse, 1e-18);
}

TEST(QsdConfig, Validation) {
    QsdConfig config = QsdConfig::standard();
    EXPECT_NO_THROW(config.validate());
    config.rep_rate = 0.0;
    EXPECT_THROW(config.validate(), ConfigError);
    config = QsdConfig::standard();
    config.source = SpdcParams::from_pair_probability(1e-4, 0.0, 16);
    EXPECT_THROW(config.validate(), ConfigError); // pair cutoff must sit below n_max
}
