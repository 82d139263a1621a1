#include <doctest.h>

#include <cmath>
#include <limits>

#include "spinboson/config.hpp"
#include "spinboson/errors.hpp"

using namespace spinboson;

TEST_CASE("defaults parse from empty text") {
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg == RunConfig{});
    CHECK(cfg.mc.convention == FieldConvention::standard);
    CHECK(cfg.model.alpha == 0.5);
}

TEST_CASE("sections and overrides") {
    const std::string text =
        "[model]\nlambda = 0.2\nmu = 0.1\n"
        "[discretization]\nscheme = manual\nomega = 1, 2.5\nv = 1,0.5\nn_max = 4\nN_max = 5\n"
        "[mc]\nT = 7.5\nseed = 99\nconvention = symmetrized\nw_flip = 0\n"
        "[scan]\nlambdas = 0.1, 0.2 ,0.4\nhorizons = 10,20,40\nlambda_units = critical\n";
    const RunConfig cfg = parse_config_text(text, {{"mc.T", "3"}, {"model.mu", "0"}});
    CHECK(cfg.model.lambda == 0.2);
    CHECK(cfg.model.mu == 0.0);
    CHECK(cfg.mc.horizon == 3.0);
    CHECK(cfg.mc.seed == 99);
    CHECK(cfg.mc.convention == FieldConvention::symmetrized);
    CHECK(cfg.mc.moves.global_flip == 0.0);
    CHECK(cfg.discretization.omega == std::vector<double>{1.0, 2.5});
    CHECK(cfg.scan.lambdas == std::vector<double>{0.1, 0.2, 0.4});
    CHECK(cfg.scan.lambda_units == LambdaUnits::critical);
    const DiscreteModes modes = cfg.modes();
    CHECK(modes.size() == 2);
    CHECK(modes.v[1] == 0.5);
}

TEST_CASE("rejections") {
    CHECK_THROWS_AS(parse_config_text("[bogus]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nlamda = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nlambda = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nlambda = 1.0x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"mc", "1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[mc]\nT = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[output]\nformat = xml\n"), ConfigError);
    CHECK_THROWS_AS(split_override("novalue"), ConfigError);
    CHECK(split_override("mc.T=5") == std::pair<std::string, std::string>{"mc.T", "5"});
}

TEST_CASE("canonical emission round trips") {
    RunConfig cfg;
    cfg.model.lambda = 0.1 + 0.2;  // not exactly representable in short decimal
    cfg.model.mu = -1e-300;
    cfg.mc.horizon = 12.25;
    cfg.mc.seed = std::numeric_limits<std::uint64_t>::max();
    cfg.scan.lambdas = {0.5, 1.0 / 3.0};
    cfg.discretization.scheme = DiscretizationScheme::log_radial;
    cfg.discretization.regularize_mass = 1e-3;
    cfg.kernel.source = KernelSourceKind::continuum;
    cfg.output.format = "csv";
    const std::string text = emit_config(cfg);
    const RunConfig back = parse_config_text(text);
    CHECK(back == cfg);
    CHECK(emit_config(back) == text);
}

TEST_CASE("digest tracks physics but not output location") {
    RunConfig a;
    RunConfig b = a;
    b.output.dir = "/tmp/elsewhere";
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 16);
    b.model.lambda = 1e-12;
    CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("shortest round-trip numbers") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0, 2.0}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
}
