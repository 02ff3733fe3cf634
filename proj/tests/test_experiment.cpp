#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "clockscar/experiment.hpp"

using namespace clockscar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) { return read_text_file(p); }

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "clockscar_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config round-trips through serialization losslessly") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Dynamics;
    cfg.n = 3;
    cfg.L = 6;
    cfg.h = 1.5;
    cfg.seed = 987654321u;
    cfg.out_dir = "out/some_dir";
    cfg.threads = 2;
    cfg.coupling_mode = CouplingMode::Explicit;
    cfg.channels = {true, false, true};
    cfg.include_last_projector = true;
    cfg.explicit_couplings[0] = {0.25, -0.5, 0.125, 1.0 / 3.0, 0.9, -0.7};
    cfg.sector = -1.0;
    cfg.realizations = 3;
    cfg.initial_state = InitialStateSpec::parse("coherent(0.5+0.25i)");
    cfg.time_periods = 7;
    cfg.time_points = 123;
    cfg.cut = 2;

    const std::string text = cfg.serialize();
    const ExperimentConfig parsed = ExperimentConfig::parse(text);
    REQUIRE(parsed.serialize() == text);
    REQUIRE(parsed.initial_state.beta == cfg.initial_state.beta);
    REQUIRE(parsed.explicit_couplings[0] == cfg.explicit_couplings[0]);
    REQUIRE(parsed.sector.has_value());
    REQUIRE(*parsed.sector == -1.0);
}

TEST_CASE("config parsing accepts comments and rejects junk") {
    REQUIRE_NOTHROW(ExperimentConfig::parse("# comment only\n\nexperiment = verify\n"));
    REQUIRE_THROWS_AS(ExperimentConfig::parse("unknown_key = 3\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("experiment = nonsense\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("channels = c9\n"), std::invalid_argument);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.L = 5;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.L = 8;
    cfg.sector = 0.0;
    cfg.channels = {true, false, true};  // c3 breaks U(1)
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.channels = {true, false, false};
    REQUIRE_NOTHROW(cfg.validate());
}

TEST_CASE("initial state descriptors") {
    auto c = InitialStateSpec::parse("coherent(0.5-0.2i)");
    REQUIRE(c.kind == InitialStateSpec::Kind::Coherent);
    REQUIRE(c.beta == std::complex<double>(0.5, -0.2));
    auto t = InitialStateSpec::parse("tower(3)");
    REQUIRE(t.tower_k == 3);
    auto b = InitialStateSpec::parse("basis(010101)");
    REQUIRE(b.basis_digits == "010101");
    auto tp = InitialStateSpec::parse("two_param(0.4,0.3+0.1i)");
    REQUIRE(tp.alpha == std::complex<double>(0.4, 0.0));
    REQUIRE(tp.beta == std::complex<double>(0.3, 0.1));
    REQUIRE(InitialStateSpec::parse("random").kind == InitialStateSpec::Kind::Random);
    REQUIRE_THROWS_AS(InitialStateSpec::parse("bogus(1)"), std::invalid_argument);
}

TEST_CASE("levelstats run writes spectra, statistics and plot data") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::LevelStats;
    cfg.n = 2;
    cfg.L = 8;
    cfg.h = 1.0;
    cfg.seed = 42;
    cfg.channels = {true, false, false};
    cfg.sector = 0.0;
    cfg.realizations = 2;
    cfg.out_dir = fresh_dir("levelstats").string();

    const auto rec = run(cfg);
    REQUIRE(rec.stats.size() == 2);
    REQUIRE(rec.summary.contains("mean_r"));
    REQUIRE(rec.summary.contains("poisson_control_mean_r"));
    REQUIRE(rec.summary["sector_dimension"] == 70);  // binom(8,4)
    for (const char* f : {"spectrum_0.csv", "spacings_0.csv", "rvalues_0.csv", "spectrum_1.csv",
                          "provenance.json", "plot_levelstats.dat"})
        REQUIRE(fs::exists(fs::path(cfg.out_dir) / f));

    // provenance embeds the resolved config exactly
    const auto prov = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "provenance.json"));
    REQUIRE(prov["config"] == cfg.serialize());
    REQUIRE(prov["seed"] == 42);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    auto make = [&](const std::string& dirname) {
        ExperimentConfig cfg;
        cfg.experiment = ExperimentKind::Dynamics;
        cfg.n = 2;
        cfg.L = 6;
        cfg.h = 1.0;
        cfg.seed = 777;
        cfg.initial_state = InitialStateSpec::parse("coherent(0.5)");
        cfg.time_points = 40;
        cfg.time_periods = 2;
        cfg.out_dir = fresh_dir(dirname).string();
        run(cfg);
        return cfg.out_dir;
    };
    const auto a = make("det_a");
    const auto b = make("det_b");
    for (const char* f : {"fidelity.csv", "entropy.csv", "plot_dynamics.dat"})
        REQUIRE(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
}

TEST_CASE("dynamics run reports perfect revivals for a coherent start") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Dynamics;
    cfg.n = 2;
    cfg.L = 6;
    cfg.h = 1.0;
    cfg.seed = 31;
    cfg.initial_state = InitialStateSpec::parse("coherent(0.5)");
    cfg.time_points = 50;
    cfg.out_dir = fresh_dir("dyn").string();
    const auto rec = run(cfg);
    for (double f : rec.summary["revival_fidelities"].get<std::vector<double>>())
        REQUIRE(f >= 1.0 - 1e-8);
    REQUIRE(rec.summary["revival_period"].get<double>() == Catch::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("ee_scatter run tags the tower") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::EeScatter;
    cfg.n = 2;
    cfg.L = 6;
    cfg.h = 1.0;
    cfg.seed = 9;
    cfg.channels = {true, true, true};
    cfg.out_dir = fresh_dir("scatter").string();
    const auto rec = run(cfg);
    REQUIRE(rec.scatter.size() == 64);
    REQUIRE(rec.summary["candidates_unmatched"] == 0);
    REQUIRE(rec.summary["candidates_matched"] == 3);  // k = 0, 1, 2 at L = 6
    const std::string csv = slurp(fs::path(cfg.out_dir) / "scatter.csv");
    REQUIRE(csv.find("tower(0)") != std::string::npos);
}

TEST_CASE("closed-form run checks the identity table") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::ClosedFormEe;
    cfg.closed_form_max_l = 16;
    cfg.out_dir = fresh_dir("cf").string();
    const auto rec = run(cfg);
    REQUIRE(rec.summary["bounds_hold"] == true);
    REQUIRE(rec.summary["vandermonde_exact"] == true);
    REQUIRE(rec.closed_form.size() == 4);
    const std::string csv = slurp(fs::path(cfg.out_dir) / "closed_form.csv");
    REQUIRE(csv.rfind("L,k,entropy,bound", 0) == 0);
}

TEST_CASE("desk-scale guard rejects vector-retaining runs beyond 2^20") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::EeScatter;
    cfg.n = 2;
    cfg.L = 22;  // 2^22 states
    cfg.out_dir = fresh_dir("guard").string();
    REQUIRE_THROWS_AS(run(cfg), DeskScaleError);
}

TEST_CASE("two-parameter scatter tags the quadratic tower family") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::EeScatter;
    cfg.n = 2;
    cfg.L = 8;
    cfg.h = 1.0;
    cfg.seed = 5;
    cfg.pert_kind = PerturbationKind::Window5;
    cfg.out_dir = fresh_dir("scatter5").string();
    const auto rec = run(cfg);
    REQUIRE(rec.summary["candidates_unmatched"] == 0);
    REQUIRE(rec.summary["candidates_matched"].get<int>() ==
            static_cast<int>(two_param_tower_family(8).size()));
    const std::string csv = slurp(fs::path(cfg.out_dir) / "scatter.csv");
    REQUIRE(csv.find("tower(0,1)") != std::string::npos);
}
