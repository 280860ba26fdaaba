// Acceptance gate: every test prints exactly one "[criterion N] PASS/FAIL"
// line with the measured values it judged, so the suite output doubles as a
// verification record.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace qsd;

namespace {

constexpr double kPi = 3.14159265358979323846;

void report(int criterion, const std::string& detail) {
    const bool ok = !::testing::Test::HasFailure();
    std::printf("[criterion %d] %s%s%s\n", criterion, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " ", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, const char* spec = "%.4g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

QsdConfig cpc_config(double intensity, double eta, double r_dark) {
    QsdConfig config = QsdConfig::standard();
    config.alpha = Complex(std::sqrt(intensity), 0.0);
    config.d1 = DetectorModel::cpc(eta, r_dark);
    config.d2 = DetectorModel::cpc(eta, r_dark);
    config.d3 = DetectorModel::cpc(eta, r_dark);
    return config;
}

QsdConfig spc_config(double intensity, double eta, double r_dark) {
    QsdConfig config = QsdConfig::standard();
    config.alpha = Complex(std::sqrt(intensity), 0.0);
    config.d1 = DetectorModel::spc(eta, r_dark);
    config.d2 = DetectorModel::spc(eta, r_dark);
    config.d3 = DetectorModel::spc(eta, r_dark);
    return config;
}

} // namespace

TEST(Acceptance, Criterion1_IdealBalancedWorkingPoint) {
    std::ostringstream detail;
    try {
        const Complex alpha(1.0, 0.0);
        const auto bs = BeamSplitterParams::fifty_fifty();
        const double fidelity =
            ideal_fidelity(alpha, bs, bs, IdealOutcome::SingleAtD2, CorrectionMode::Auto);
        const double probability =
            ideal_detection_probability(alpha, bs, bs, IdealOutcome::SingleAtD2);
        EXPECT_NEAR(fidelity, 1.0, 1e-12);
        EXPECT_NEAR(probability, 0.1839, 1e-3);
        detail << "F=" << fmt(fidelity, "%.15f") << ", P=" << fmt(probability, "%.6f");
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(1, detail.str());
}

TEST(Acceptance, Criterion2_FidelitySurfaceDiagonal) {
    std::ostringstream detail;
    try {
        const Complex alpha(1.0, 0.0);
        double max_diag_err = 0.0;
        double max_offdiag = 0.0;
        int degenerate_corners = 0;
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double t1_sq = double(i) / 20.0;
                const double t2_sq = double(j) / 20.0;
                if (i == j && (i == 0 || i == 20)) {
                    // both splitter outputs carry nothing toward the kept
                    // mode; conditioning has probability zero
                    EXPECT_THROW(ideal_fidelity(alpha,
                                                BeamSplitterParams::from_transmittance(t1_sq),
                                                BeamSplitterParams::from_transmittance(t2_sq),
                                                IdealOutcome::SingleAtD2, CorrectionMode::Auto),
                                 DegenerateError)
                        << "at t^2=" << t1_sq;
                    ++degenerate_corners;
                    continue;
                }
                const double fidelity = ideal_fidelity(
                    alpha, BeamSplitterParams::from_transmittance(t1_sq),
                    BeamSplitterParams::from_transmittance(t2_sq), IdealOutcome::SingleAtD2,
                    CorrectionMode::Auto);
                if (i == j) {
                    EXPECT_NEAR(fidelity, 1.0, 1e-10) << "diagonal t^2=" << t1_sq;
                    max_diag_err = std::max(max_diag_err, std::abs(fidelity - 1.0));
                } else {
                    EXPECT_LT(fidelity, 1.0 - 1e-6)
                        << "off-diagonal (" << t1_sq << ", " << t2_sq << ")";
                    max_offdiag = std::max(max_offdiag, fidelity);
                }
            }
        }
        EXPECT_EQ(degenerate_corners, 2);
        detail << "max |F-1| on diagonal=" << fmt(max_diag_err) << ", max off-diagonal F="
               << fmt(max_offdiag, "%.6f") << ", degenerate corners=" << degenerate_corners;
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(2, detail.str());
}

TEST(Acceptance, Criterion3_PerfectPipelineMatchesProjector) {
    std::ostringstream detail;
    try {
        auto rng = qsd_test::fixed_rng(303);
        const std::vector<double> single_pair = {0.0, 1.0};
        double min_fidelity = 1.0;
        for (int draw = 0; draw < 10; ++draw) {
            QsdConfig config = QsdConfig::standard();
            config.cutoff = CutoffDim(12);
            config.alpha = std::polar(qsd_test::uniform(rng, 0.3, 1.2),
                                      qsd_test::uniform(rng, 0.0, 2.0 * kPi));
            config.bs1 = BeamSplitterParams::from_transmittance(
                qsd_test::uniform(rng, 0.15, 0.85));
            config.bs2 = BeamSplitterParams::from_transmittance(
                qsd_test::uniform(rng, 0.15, 0.85));
            config.d1 = DetectorModel::pndc().idealized();
            config.d2 = DetectorModel::pndc().idealized();
            config.d3 = DetectorModel::pndc().idealized();
            const TruncationResult result = realistic_truncation_with_source(
                config, ClickPattern{1, 1, 0}, single_pair, CorrectionMode::Auto);
            const PureState target =
                ideal_truncated_state(config.alpha, config.bs1, config.bs2,
                                      IdealOutcome::SingleAtD2, CorrectionMode::Auto,
                                      config.cutoff);
            const double fidelity = fidelity_to_pure(result.state, target);
            EXPECT_GE(fidelity, 1.0 - 1e-10) << "draw " << draw;
            min_fidelity = std::min(min_fidelity, fidelity);
        }
        detail << "min state fidelity over 10 draws=" << fmt(min_fidelity, "%.12f");
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(3, detail.str());
}

TEST(Acceptance, Criterion4_ClickCounterFidelityPoints) {
    std::ostringstream detail;
    try {
        const auto fidelity_at = [](double intensity, double eta, double r_dark) {
            return realistic_truncation(cpc_config(intensity, eta, r_dark),
                                        ClickPattern{1, 1, 0}, CorrectionMode::Auto)
                .fidelity_to_desired;
        };
        const double f_standard = fidelity_at(1.0, 0.7, 100.0);
        const double f_blind = fidelity_at(1.0, 0.0, 100.0);
        EXPECT_NEAR(f_standard, 0.92, 0.02);
        EXPECT_NEAR(f_blind, 0.50, 0.01);

        const std::vector<double> etas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        const std::vector<double> darks = {0.0, 250.0, 500.0, 750.0, 1000.0};
        const auto range_at = [&](double intensity) {
            double lo = 1.0, hi = 0.0;
            for (const double eta : etas)
                for (const double dark : darks) {
                    const double f = fidelity_at(intensity, eta, dark);
                    lo = std::min(lo, f);
                    hi = std::max(hi, f);
                }
            return std::pair<double, double>(lo, hi);
        };
        const auto [lo_half, hi_half] = range_at(0.5);
        const auto [lo_one, hi_one] = range_at(1.0);
        EXPECT_NEAR(lo_half, 0.90, 0.02);
        EXPECT_NEAR(hi_half, 0.97, 0.02);
        EXPECT_NEAR(lo_one, 0.81, 0.02);
        EXPECT_NEAR(hi_one, 0.93, 0.02);
        detail << "F(|a|^2=1)=" << fmt(f_standard, "%.4f") << ", F(eta=0)="
               << fmt(f_blind, "%.4f") << ", range(0.5)=[" << fmt(lo_half, "%.4f") << ", "
               << fmt(hi_half, "%.4f") << "], range(1.0)=[" << fmt(lo_one, "%.4f") << ", "
               << fmt(hi_one, "%.4f") << "]";
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(4, detail.str());
}

TEST(Acceptance, Criterion5_SinglePhotonCounterFidelityPoints) {
    std::ostringstream detail;
    try {
        const auto fidelity_at = [](double intensity, double r_dark) {
            return realistic_truncation(spc_config(intensity, 0.7, r_dark),
                                        ClickPattern{1, 1, 0}, CorrectionMode::Auto)
                .fidelity_to_desired;
        };
        const double f_04_quiet = fidelity_at(0.4, 100.0);
        const double f_04_noisy = fidelity_at(0.4, 1e4);
        const double f_10_quiet = fidelity_at(1.0, 100.0);
        const double f_10_noisy = fidelity_at(1.0, 1e4);
        EXPECT_NEAR(f_04_quiet, 0.98, 0.02);
        EXPECT_NEAR(f_04_noisy, 0.94, 0.02);
        EXPECT_NEAR(f_10_quiet, 0.93, 0.02);
        EXPECT_NEAR(f_10_noisy, 0.84, 0.02);
        detail << "|a|^2=0.4: F=" << fmt(f_04_quiet, "%.4f") << " -> "
               << fmt(f_04_noisy, "%.4f") << "; |a|^2=1.0: F=" << fmt(f_10_quiet, "%.4f")
               << " -> " << fmt(f_10_noisy, "%.4f");
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(5, detail.str());
}

TEST(Acceptance, Criterion6_StrategyOrderingAndRates) {
    std::ostringstream detail;
    try {
        const std::vector<double> intensities = {0.2, 0.6, 1.0, 2.0};
        for (const double intensity : intensities) {
            QsdConfig base = QsdConfig::standard();
            base.alpha = Complex(std::sqrt(intensity), 0.0);
            double fidelity[4], rate[4];
            for (int s = 0; s < 4; ++s) {
                const TruncationResult result =
                    run_strategy(base, Strategy(s), CorrectionMode::Auto);
                fidelity[s] = result.fidelity_to_desired;
                rate[s] = result.rate_per_second;
            }
            const double best_cd = std::max(fidelity[2], fidelity[3]);
            const double worst_ab = std::min(fidelity[0], fidelity[1]);
            EXPECT_GT(worst_ab, best_cd) << "|a|^2=" << intensity;
            if (intensity <= 0.6) {
                for (int s = 0; s < 4; ++s) {
                    EXPECT_GT(fidelity[s], 0.90)
                        << "strategy " << to_string(Strategy(s)) << " at |a|^2=" << intensity;
                    EXPECT_GE(rate[s], 1000.0 / 3.0)
                        << "strategy " << to_string(Strategy(s)) << " at |a|^2=" << intensity;
                    EXPECT_LE(rate[s], 3000.0)
                        << "strategy " << to_string(Strategy(s)) << " at |a|^2=" << intensity;
                }
            }
            detail << "|a|^2=" << fmt(intensity, "%.1f") << ": F(a..d)=["
                   << fmt(fidelity[0], "%.4f") << ", " << fmt(fidelity[1], "%.4f") << ", "
                   << fmt(fidelity[2], "%.4f") << ", " << fmt(fidelity[3], "%.4f")
                   << "], rate(a..d)/s=[" << fmt(rate[0], "%.0f") << ", "
                   << fmt(rate[1], "%.0f") << ", " << fmt(rate[2], "%.0f") << ", "
                   << fmt(rate[3], "%.0f") << "]; ";
        }
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(6, detail.str());
}

TEST(Acceptance, Criterion7_CoherentBaselines) {
    std::ostringstream detail;
    try {
        const double f_dephased = fidelity_dephased(Complex(2.0, 0.0));
        EXPECT_NEAR(f_dephased, 0.68, 1e-3);

        const Complex alpha_08(std::sqrt(0.8), 0.0);
        const double beta_sq = std::norm(optimal_beta(alpha_08));
        const double f_optimal = fidelity_attenuated_optimal(alpha_08);
        EXPECT_NEAR(beta_sq, 0.344, 0.005);
        EXPECT_NEAR(f_optimal, 0.92, 0.01);
        detail << "F1(4)=" << fmt(f_dephased, "%.4f") << ", |beta|^2=" << fmt(beta_sq, "%.4f")
               << ", F2=" << fmt(f_optimal, "%.4f") << "; tails:";

        for (const double intensity : {4.1, 4.5, 5.0, 6.0, 8.0, 10.0}) {
            const Complex alpha(std::sqrt(intensity), 0.0);
            const double full = fidelity_attenuated(alpha, 1.0);
            const double half = fidelity_attenuated(alpha, 0.5);
            EXPECT_LT(full, 0.09) << "xi=1 at |a|^2=" << intensity;
            EXPECT_LT(half, 0.09) << "xi=1/2 at |a|^2=" << intensity;
            detail << " |a|^2=" << fmt(intensity, "%.1f") << ": xi1=" << fmt(full, "%.4f")
                   << " xi0.5=" << fmt(half, "%.4f") << ";";
        }
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(7, detail.str());
}

TEST(Acceptance, Criterion8_WignerAndPhaseStructure) {
    std::ostringstream detail;
    try {
        const PhaseSpaceGrid grid;
        const BasisIndexer indexer(1, CutoffDim(16));
        const DensityOperator vacuum = projector(basis_state(indexer, {0}));
        const DensityOperator one = projector(basis_state(indexer, {1}));
        const DensityOperator ideal_08 = projector(
            ideal_truncated_state(Complex(std::sqrt(0.8), 0.0),
                                  BeamSplitterParams::fifty_fifty(),
                                  BeamSplitterParams::fifty_fifty(), IdealOutcome::SingleAtD2,
                                  CorrectionMode::Auto, CutoffDim(16)));
        double worst_norm_err = 0.0;
        for (const DensityOperator* rho : {&vacuum, &one, &ideal_08}) {
            const double integral = wigner_integral(wigner(*rho, grid), grid);
            EXPECT_NEAR(integral, 1.0, 1e-6);
            worst_norm_err = std::max(worst_norm_err, std::abs(integral - 1.0));
        }
        const double w_vac = wigner_point(vacuum, 0.0, 0.0);
        const double w_one = wigner_point(one, 0.0, 0.0);
        EXPECT_NEAR(w_vac, 2.0 / kPi, 1e-9);
        EXPECT_NEAR(w_one, -2.0 / kPi, 1e-9);

        // blind detectors leave a phase-symmetric state
        const TruncationResult blind = realistic_truncation(
            cpc_config(1.0, 0.0, 100.0), ClickPattern{1, 1, 0}, CorrectionMode::Auto);
        const QuadratureRule rule = QuadratureRule::for_cutoff(CutoffDim(16));
        const PhaseDistribution blind_dist = wigner_phase_distribution(blind.state, rule);
        double max_flat_err = 0.0;
        for (const double v : blind_dist.value)
            max_flat_err = std::max(max_flat_err, std::abs(v - 1.0 / (2.0 * kPi)));
        EXPECT_LT(max_flat_err, 1e-6);

        // the ideal truncated state at unit intensity has a small negative dip
        const DensityOperator ideal_10 = projector(
            ideal_truncated_state(Complex(1.0, 0.0), BeamSplitterParams::fifty_fifty(),
                                  BeamSplitterParams::fifty_fifty(), IdealOutcome::SingleAtD2,
                                  CorrectionMode::Auto, CutoffDim(16)));
        const PhaseDistribution ideal_dist = wigner_phase_distribution(ideal_10, rule);
        double min_value = ideal_dist.value[0];
        double min_theta = ideal_dist.theta[0];
        for (size_t k = 0; k < ideal_dist.value.size(); ++k)
            if (ideal_dist.value[k] < min_value) {
                min_value = ideal_dist.value[k];
                min_theta = ideal_dist.theta[k];
            }
        EXPECT_NEAR(min_value, -0.0403, 0.002);

        // Wigner negativity survives eta=0.7 but not eta=0.3
        const TruncationResult lossy_07 = realistic_truncation(
            cpc_config(0.8, 0.7, 100.0), ClickPattern{1, 1, 0}, CorrectionMode::Auto);
        const TruncationResult lossy_03 = realistic_truncation(
            cpc_config(0.8, 0.3, 100.0), ClickPattern{1, 1, 0}, CorrectionMode::Auto);
        const double min_07 =
            wigner_negativity(wigner(lossy_07.state, grid), grid).min_value;
        const double min_03 =
            wigner_negativity(wigner(lossy_03.state, grid), grid).min_value;
        EXPECT_LT(min_07, -1e-3);
        EXPECT_GT(min_03, -1e-4);

        detail << "max |int W - 1|=" << fmt(worst_norm_err) << ", W_vac(0,0)-2/pi="
               << fmt(w_vac - 2.0 / kPi) << ", flat-dist err=" << fmt(max_flat_err)
               << ", phase min=" << fmt(min_value, "%.5f") << " at theta="
               << fmt(min_theta, "%.3f") << ", W min(eta=0.7)=" << fmt(min_07, "%.4f")
               << ", W min(eta=0.3)=" << fmt(min_03);
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(8, detail.str());
}

TEST(Acceptance, Criterion9_TwoClickChannel) {
    std::ostringstream detail;
    try {
        const QsdConfig config = spc_config(1.0, 0.7, 1e4);
        const TruncationResult result =
            realistic_truncation(config, ClickPattern{1, 2, 1}, CorrectionMode::Auto);
        EXPECT_GE(result.rate_per_second, 680.0 * 0.8);
        EXPECT_LE(result.rate_per_second, 680.0 * 1.2);
        EXPECT_NEAR(result.fidelity_to_desired, 0.84, 0.03);
        detail << "rate=" << fmt(result.rate_per_second, "%.1f")
               << "/s, F=" << fmt(result.fidelity_to_desired, "%.4f");
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(9, detail.str());
}

#ifdef QSD_CLI_PATH
TEST(Acceptance, Criterion10_ByteIdenticalFigureRuns) {
    std::ostringstream detail;
    try {
        const auto dir_a = qsd_test::make_temp_dir("accept_a");
        const auto dir_b = qsd_test::make_temp_dir("accept_b");
        const auto run_a = qsd_test::run_cli("figure fig5 --out " + dir_a.string());
        const auto run_b = qsd_test::run_cli("figure fig5 --out " + dir_b.string());
        EXPECT_EQ(run_a.exit_code, 0) << run_a.output;
        EXPECT_EQ(run_b.exit_code, 0) << run_b.output;
        const std::string csv_a = qsd_test::read_file(dir_a / "fig5.csv");
        const std::string csv_b = qsd_test::read_file(dir_b / "fig5.csv");
        const std::string meta_a = qsd_test::read_file(dir_a / "fig5.meta");
        const std::string meta_b = qsd_test::read_file(dir_b / "fig5.meta");
        EXPECT_FALSE(csv_a.empty());
        EXPECT_EQ(csv_a, csv_b);
        EXPECT_EQ(meta_a, meta_b);
        detail << "fig5.csv " << csv_a.size() << " bytes, identical across runs="
               << (csv_a == csv_b ? "yes" : "no");
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
    } catch (const std::exception& e) {
        ADD_FAILURE() << "exception: " << e.what();
    }
    report(10, detail.str());
}
#endif
