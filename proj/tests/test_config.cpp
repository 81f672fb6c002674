#include <gtest/gtest.h>

#include <sstream>

#include "csalsa/config.hpp"

using namespace csalsa;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

int error_line(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string error_field(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

}  // namespace

TEST(Config, ParsesKeysAndComments)
{
    const ExperimentConfig c = parse("# header\n"
                                     "mu = 0.5   # trailing\n"
                                     "\n"
                                     "experiment = deblur-2a\n"
                                     "regularizer = l1-analysis\n"
                                     "seed = 7\n"
                                     "epsilon = 12.5\n"
                                     "tv_warm_start = yes\n");
    EXPECT_EQ(c.experiment, "deblur-2a");
    EXPECT_EQ(c.name, "deblur-2a");
    EXPECT_EQ(*c.mu, 0.5);
    EXPECT_EQ(c.formulation, Formulation::L1Analysis);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(*c.epsilon, 12.5);
    EXPECT_TRUE(c.tv.warm_start);
    // Experiment defaults survive for keys not given.
    EXPECT_EQ(c.kernel_support, 9);
    EXPECT_TRUE(c.warm_start);
}

TEST(Config, ExperimentDefaults)
{
    EXPECT_EQ(default_experiment("mri").lines, 22u);
    EXPECT_EQ(default_experiment("mri").iterations, 300);
    EXPECT_EQ(default_experiment("mri").tv.inner_iterations, 10);
    EXPECT_EQ(default_experiment("hdr").lines, 27u);
    EXPECT_EQ(default_experiment("hdr").iterations, 150);
    EXPECT_EQ(default_experiment("inpainting").iterations, 200);
    EXPECT_EQ(default_experiment("deblur-3b").kernel_support, 15);
    EXPECT_THROW(default_experiment("deblur-4"), ConfigError);
    for (const std::string& e : experiment_names()) {
        for (Formulation f : {Formulation::TV, Formulation::L1Analysis, Formulation::L1Synthesis}) {
            EXPECT_GT(default_mu(e, f), 0.0);
        }
    }
}

TEST(Config, ErrorsNameLineAndField)
{
    EXPECT_EQ(error_line("experiment = mri\nsize = big\n"), 2);
    EXPECT_EQ(error_field("experiment = mri\nsize = big\n"), "size");
    EXPECT_EQ(error_line("experiment = mri\n\nwhatever = 1\n"), 3);
    EXPECT_EQ(error_field("experiment = mri\nwhatever = 1\n"), "whatever");
    EXPECT_EQ(error_line("experiment = mri\nmu = 1\nmu = 2\n"), 3);
    EXPECT_EQ(error_line("experiment = mri\njust text\n"), 2);
    EXPECT_EQ(error_field("mu = 1\n"), "experiment");
    EXPECT_EQ(error_field("experiment = ct\n"), "experiment");
    EXPECT_EQ(error_field("experiment = mri\nmu = -1\n"), "mu");
    EXPECT_EQ(error_field("experiment = mri\nkernel_support = 4\n"), "kernel_support");
    EXPECT_EQ(error_field("experiment = mri\nregularizer = l2\n"), "regularizer");
    EXPECT_EQ(error_field("experiment = mri\nname = ../x\n"), "name");
    EXPECT_EQ(error_field("experiment = mri\nwarm_start = maybe\n"), "warm_start");
    EXPECT_EQ(error_field("experiment = mri\nmissing_fraction = 1\n"), "missing_fraction");
}

TEST(Config, FormatRoundTrips)
{
    ExperimentConfig c = parse("experiment = hdr\nname = h1\nmu = 0.3\nsigma = 0.05\nlevels = 3\nsquares = 9\n");
    const ExperimentConfig back = parse(format_config(c));
    EXPECT_EQ(format_config(back), format_config(c));
    EXPECT_EQ(back.name, "h1");
    EXPECT_EQ(*back.sigma, 0.05);
    EXPECT_EQ(back.squares, 9);
}

TEST(Config, PreparedExperimentsAreDeterministic)
{
    ExperimentConfig c = default_experiment("hdr");
    c.size = 32;
    c.lines = 8;
    const PreparedExperiment a = prepare_experiment(c);
    const PreparedExperiment b = prepare_experiment(c);
    EXPECT_EQ(a.instance.observation, b.instance.observation);
    EXPECT_EQ(a.instance.truth, b.instance.truth);
    c.seed = 2;
    EXPECT_NE(prepare_experiment(c).instance.observation, a.instance.observation);
    EXPECT_DOUBLE_EQ(a.solver.mu, default_mu("hdr", Formulation::TV));
    EXPECT_DOUBLE_EQ(a.instance.sigma, 0.1);
}

TEST(Config, InpaintingNoiseFromObservedPower)
{
    ExperimentConfig c = default_experiment("inpainting");
    c.size = 64;
    const PreparedExperiment p = prepare_experiment(c);
    double power = 0.0;
    const Mask& m = p.instance.op.mask();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) power += p.instance.truth[i] * p.instance.truth[i];
    }
    power /= static_cast<double>(count_true(m));
    EXPECT_NEAR(10.0 * std::log10(power / (p.instance.sigma * p.instance.sigma)), 40.0, 1e-9);
}

TEST(Config, MriAndDeblurNoiseLevels)
{
    ExperimentConfig m = default_experiment("mri");
    m.size = 32;
    m.lines = 6;
    EXPECT_NEAR(prepare_experiment(m).instance.sigma * prepare_experiment(m).instance.sigma, 0.5e-6, 1e-18);
    const char* names[] = {"deblur-1", "deblur-2a", "deblur-2b", "deblur-3a", "deblur-3b"};
    const double var[] = {0.56 * 0.56, 2.0, 8.0, 2.0, 8.0};
    for (int i = 0; i < 5; ++i) {
        ExperimentConfig d = default_experiment(names[i]);
        d.size = 32;
        const double s = prepare_experiment(d).instance.sigma;
        EXPECT_NEAR(s * s, var[i], 1e-12) << names[i];
    }
}
