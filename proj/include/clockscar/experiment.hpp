#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "clockscar/config.hpp"
#include "clockscar/dynamics.hpp"
#include "clockscar/eigensolve.hpp"
#include "clockscar/entanglement.hpp"
#include "clockscar/io.hpp"
#include "clockscar/models.hpp"
#include "clockscar/tensornet.hpp"
#include "clockscar/verify.hpp"
#include "clockscar/version.hpp"

namespace clockscar {

struct DeskScaleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kVectorRetainingCap = std::int64_t(1) << 20;

struct ExperimentRecord {
    ExperimentConfig config;
    nlohmann::json summary;
    double wall_time_s = 0.0;

    // Per-kind payloads.
    std::vector<Eigen::VectorXd> spectra;
    std::vector<LevelStatistics> stats;
    std::vector<EEPoint> scatter;
    DynamicsTrace fidelity_data;
    DynamicsTrace entropy_data;
    std::vector<ClosedFormEE> closed_form;
    VerifyReport verify;
};

// ---------------------------------------------------------------------------
// Model assembly from a config.
// ---------------------------------------------------------------------------

namespace detail {

inline PerturbationCoefficients couplings_from_config(const ExperimentConfig& cfg,
                                                      std::uint64_t realization_seed) {
    switch (cfg.coupling_mode) {
        case CouplingMode::Zero:
            return PerturbationCoefficients::zero(cfg.n, cfg.L);
        case CouplingMode::RandomUniform:
            if (cfg.n == 2) return PerturbationCoefficients::random_n2(cfg.L, realization_seed, cfg.channels);
            if (cfg.n == 3)
                return PerturbationCoefficients::random_n3(cfg.L, realization_seed,
                                                           cfg.include_last_projector);
            return PerturbationCoefficients::zero(cfg.n, cfg.L);
        case CouplingMode::Explicit: {
            PerturbationCoefficients pc = PerturbationCoefficients::zero(cfg.n, cfg.L);
            if (cfg.n != 2)
                throw std::invalid_argument("explicit couplings are supported for n = 2 only");
            for (int i = 0; i < 3; ++i) {
                if (cfg.explicit_couplings[i].empty()) continue;
                if (static_cast<int>(cfg.explicit_couplings[i].size()) != cfg.L)
                    throw std::invalid_argument("explicit coupling list must have L entries");
                pc.c[i] = cfg.explicit_couplings[i];
            }
            return pc;
        }
    }
    return PerturbationCoefficients::zero(cfg.n, cfg.L);
}

struct ResolvedModel {
    ModelSpec spec;
    SparseOperator hamiltonian;
    std::array<std::vector<double>, 2> window5_weights;  // set for PerturbationKind::Window5
    nlohmann::json coupling_provenance;
};

inline ResolvedModel build_model(const ExperimentConfig& cfg, std::uint64_t realization_seed) {
    ResolvedModel rm;
    rm.spec.n = cfg.n;
    rm.spec.L = cfg.L;
    rm.spec.h = cfg.h;
    rm.spec.couplings = couplings_from_config(cfg, realization_seed);
    rm.spec.couplings.rng_seed = realization_seed;

    if (cfg.pert_kind == PerturbationKind::Window5) {
        // H_S = H_2 + five-site projector disorder + Zeeman field.
        RngStream rng(realization_seed, "couplings/window5");
        for (auto& w : rm.window5_weights) {
            w.resize(cfg.L);
            for (int j = 0; j < cfg.L; ++j)
                w[j] = (cfg.coupling_mode == CouplingMode::Zero) ? 0.0 : rng.uniform_pm1();
        }
        rm.hamiltonian = build_h_n(2, cfg.L);
        rm.hamiltonian.matrix += build_perturbation_two_param(cfg.L, rm.window5_weights).matrix;
        if (cfg.h != 0.0) rm.hamiltonian.matrix += cfg.h * build_charge_q(2, cfg.L).matrix;
        rm.hamiltonian.hermitian = true;
        rm.coupling_provenance["window5_weights"] = rm.window5_weights;
    } else {
        rm.hamiltonian = build_h_s(rm.spec);
        if (cfg.n == 2)
            rm.coupling_provenance["c"] = rm.spec.couplings.c;
        else if (cfg.n == 3) {
            rm.coupling_provenance["projector_weights"] = rm.spec.couplings.projector_weights;
            rm.coupling_provenance["include_last_projector"] = rm.spec.couplings.include_last_projector;
        }
    }
    rm.coupling_provenance["realization_seed"] = realization_seed;
    return rm;
}

inline void guard_vector_scale(const ExperimentConfig& cfg) {
    if (ipow(cfg.n, cfg.L) > kVectorRetainingCap)
        throw DeskScaleError("desk-scale exceeded: n^L > 2^20 for an eigenvector-retaining run");
}

inline Eigen::VectorXcd resolve_initial_state(const ExperimentConfig& cfg) {
    const BasisIndex basis(cfg.L, cfg.n);
    const auto& is = cfg.initial_state;
    switch (is.kind) {
        case InitialStateSpec::Kind::Coherent:
            return coherent_state(cfg.n, cfg.L, is.beta).normalized();
        case InitialStateSpec::Kind::TwoParam: {
            if (cfg.n != 2) throw std::invalid_argument("two_param initial state requires n = 2");
            return two_param_state(is.alpha, is.beta, cfg.L).normalized();
        }
        case InitialStateSpec::Kind::Tower: {
            auto ts = scar_tower(cfg.n, cfg.L, is.tower_k);
            if (ts.is_zero) throw std::invalid_argument("tower initial state is annihilated");
            return ts.state;
        }
        case InitialStateSpec::Kind::Basis: {
            std::vector<int> digits;
            digits.reserve(is.basis_digits.size());
            for (char ch : is.basis_digits) digits.push_back(ch - '0');
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
            v(basis.encode(digits)) = 1.0;
            return v;
        }
        case InitialStateSpec::Kind::Random: {
            RngStream rng(cfg.seed, "initial/random");
            return haar_random_state(basis.dimension(), rng);
        }
    }
    throw std::invalid_argument("unresolved initial state");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment drivers.
// ---------------------------------------------------------------------------

inline void run_levelstats(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const int R = cfg.realizations;
    rec.spectra.resize(R);
    rec.stats.resize(R);
    std::vector<nlohmann::json> coupling_prov(R);

    auto work = [&](int i) {
        const std::uint64_t rseed = sub_seed(cfg.seed, "realization/" + std::to_string(i));
        auto rm = detail::build_model(cfg, rseed);
        DiagonalizeOptions opts;
        opts.sector = cfg.sector;
        opts.compute_vectors = false;
        const auto dec = diagonalize(rm.hamiltonian, cfg.n, cfg.L, opts);
        rec.spectra[i] = dec.eigenvalues;
        rec.stats[i] = level_spacing_stats(dec.eigenvalues);
        coupling_prov[i] = rm.coupling_provenance;
    };

    if (cfg.threads > 1) {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < std::min(cfg.threads, R); ++t)
            pool.emplace_back([&] {
                for (int i = next++; i < R; i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (int i = 0; i < R; ++i) work(i);
    }

    double pooled_r = 0.0;
    std::size_t pooled_count = 0;
    nlohmann::json per_real = nlohmann::json::array();
    for (int i = 0; i < R; ++i) {
        for (double r : rec.stats[i].r_values) pooled_r += r;
        pooled_count += rec.stats[i].r_values.size();
        per_real.push_back({{"mean_r", rec.stats[i].mean_r},
                            {"dropped_degenerate", rec.stats[i].dropped_degenerate},
                            {"levels", rec.spectra[i].size()},
                            {"couplings", coupling_prov[i]}});
    }
    rec.summary["realizations"] = per_real;
    rec.summary["mean_r"] = pooled_r / static_cast<double>(pooled_count);

    // Seeded Poisson control at matched level count.
    const auto control = level_spacing_stats(
        synthetic_poisson_levels(rec.spectra[0].size(), sub_seed(cfg.seed, "surrogate/poisson")));
    rec.summary["poisson_control_mean_r"] = control.mean_r;
    if (cfg.sector) rec.summary["sector_dimension"] = rec.spectra[0].size();
}

inline void run_ee_scatter(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    detail::guard_vector_scale(cfg);
    const std::uint64_t rseed = sub_seed(cfg.seed, "realization/0");
    auto rm = detail::build_model(cfg, rseed);
    DiagonalizeOptions opts;
    opts.sector = cfg.sector;
    const auto dec = diagonalize(rm.hamiltonian, cfg.n, cfg.L, opts);
    const int cut = cfg.resolved_cut();
    rec.scatter = ee_scatter(dec, cfg.n, cfg.L, cut);

    std::vector<std::pair<ScarTag, Eigen::VectorXcd>> candidates;
    if (cfg.pert_kind == PerturbationKind::Window5) {
        for (const auto& t : two_param_tower_family(cfg.L))
            candidates.push_back({ScarTag{ScarTag::Kind::Tower, t.k1, t.k2}, t.state});
    } else {
        for (const auto& t : scar_tower_family(cfg.n, cfg.L))
            candidates.push_back({ScarTag{ScarTag::Kind::Tower, t.k}, t.state});
        if (cfg.n == 3) {
            const auto magnons = one_magnon_family(cfg.L);
            for (int m = 0; m < cfg.L; ++m)
                candidates.push_back({ScarTag{ScarTag::Kind::OneMagnon, m}, magnons[m]});
        }
    }
    const auto matches = tag_scar_points(rec.scatter, dec, candidates);

    int matched = 0, unmatched = 0;
    for (const auto& m : matches) (m.matched ? matched : unmatched)++;
    double bulk_median = 0.0;
    {
        std::vector<double> bulk;
        for (const auto& p : rec.scatter)
            if (p.tag.kind == ScarTag::Kind::None) bulk.push_back(p.entropy);
        if (!bulk.empty()) {
            std::sort(bulk.begin(), bulk.end());
            bulk_median = bulk[bulk.size() / 2];
        }
    }
    double max_tagged = 0.0;
    for (const auto& p : rec.scatter)
        if (p.tag.kind != ScarTag::Kind::None) max_tagged = std::max(max_tagged, p.entropy);

    rec.summary["couplings"] = rm.coupling_provenance;
    rec.summary["candidates_matched"] = matched;
    rec.summary["candidates_unmatched"] = unmatched;
    rec.summary["bulk_median_entropy"] = bulk_median;
    rec.summary["max_tagged_entropy"] = max_tagged;
    rec.summary["page_value"] = page_value(cfg.L, cfg.n);
    rec.summary["tower_entropy_bound"] = std::log(0.5 * cfg.L + 1.0) + std::log(2.0);
}

inline void run_dynamics(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    detail::guard_vector_scale(cfg);
    const std::uint64_t rseed = sub_seed(cfg.seed, "realization/0");
    auto rm = detail::build_model(cfg, rseed);
    const auto dec = diagonalize(rm.hamiltonian, cfg.n, cfg.L, {});
    const Eigen::VectorXcd psi0 = detail::resolve_initial_state(cfg);

    const double period = revival_period(cfg.n, cfg.h != 0.0 ? cfg.h : 1.0);
    const auto grid = default_time_grid(period, cfg.time_periods, cfg.time_points);
    rec.fidelity_data = fidelity_trace(psi0, dec, grid);
    rec.fidelity_data.initial_state_label = cfg.initial_state.to_string();
    rec.entropy_data = ee_trace(psi0, dec, grid, cfg.resolved_cut(), cfg.n, cfg.L);
    rec.entropy_data.initial_state_label = rec.fidelity_data.initial_state_label;

    std::vector<double> revival_times;
    for (int k = 1; k <= cfg.time_periods; ++k) revival_times.push_back(k * period);
    const auto revivals = fidelity_trace(psi0, dec, revival_times);

    rec.summary["couplings"] = rm.coupling_provenance;
    rec.summary["initial_state"] = rec.fidelity_data.initial_state_label;
    rec.summary["revival_period"] = period;
    rec.summary["revival_fidelities"] = revivals.fidelity;
    rec.summary["page_value"] = page_value(cfg.L, cfg.n);
    double late = 0.0;
    const std::size_t half = rec.entropy_data.entropy.size() / 2;
    for (std::size_t i = half; i < rec.entropy_data.entropy.size(); ++i)
        late += rec.entropy_data.entropy[i];
    rec.summary["late_time_mean_entropy"] =
        late / static_cast<double>(rec.entropy_data.entropy.size() - half);
}

inline void run_closed_form(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    bool bounds_hold = true, vandermonde = true;
    for (int L = 4; L <= cfg.closed_form_max_l; L += 4) {
        auto cf = scar_ee_closed_form(L);
        bounds_hold = bounds_hold && cf.entropy <= cf.bound + 1e-12;
        vandermonde = vandermonde && (cf.normalization == big_binomial(3 * L / 4, L / 4));
        rec.closed_form.push_back(std::move(cf));
    }
    nlohmann::json cross = nlohmann::json::array();
    for (int L = 4; L <= std::min(cfg.closed_form_max_l, 12); L += 4) {
        const double numeric = scar_ee_numerical_obc(L, L / 4);
        const double closed = rec.closed_form[(L - 4) / 4].entropy;
        cross.push_back({{"L", L}, {"closed_form", closed}, {"numerical", numeric},
                         {"difference", std::abs(closed - numeric)}});
    }
    rec.summary["numerical_cross_check"] = cross;
    rec.summary["bounds_hold"] = bounds_hold;
    rec.summary["vandermonde_exact"] = vandermonde;
    rec.summary["max_L"] = cfg.closed_form_max_l;
}

inline void run_verify(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    rec.verify = run_verification_suite(cfg.seed);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rec.verify.checks)
        checks.push_back({{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed}});
    rec.summary["checks"] = checks;
    rec.summary["all_passed"] = rec.verify.all_passed;
}

// ---------------------------------------------------------------------------
// File output.
// ---------------------------------------------------------------------------

inline void write_record_files(const ExperimentRecord& rec) {
    namespace fs = std::filesystem;
    const fs::path dir(rec.config.out_dir);
    ensure_directory(dir);

    switch (rec.config.experiment) {
        case ExperimentKind::LevelStats:
            for (std::size_t i = 0; i < rec.spectra.size(); ++i) {
                const std::string suffix = "_" + std::to_string(i) + ".csv";
                CsvWriter spec(dir / ("spectrum" + suffix), {"index", "eigenvalue"});
                for (Eigen::Index k = 0; k < rec.spectra[i].size(); ++k)
                    spec.row({std::to_string(k), format_sci(rec.spectra[i](k))});
                CsvWriter sp(dir / ("spacings" + suffix), {"s"});
                for (double s : rec.stats[i].spacings) sp.row({format_sci(s)});
                CsvWriter rv(dir / ("rvalues" + suffix), {"r"});
                for (double r : rec.stats[i].r_values) rv.row({format_sci(r)});
            }
            break;
        case ExperimentKind::EeScatter: {
            CsvWriter sc(dir / "scatter.csv", {"energy", "entropy", "scar_tag", "overlap"});
            for (const auto& p : rec.scatter)
                sc.row({format_sci(p.energy), format_sci(p.entropy), p.tag.label(),
                        format_sci(p.overlap_with_tag)});
            break;
        }
        case ExperimentKind::Dynamics: {
            CsvWriter f(dir / "fidelity.csv", {"t", "fidelity"});
            for (std::size_t i = 0; i < rec.fidelity_data.times.size(); ++i)
                f.row_values({rec.fidelity_data.times[i], rec.fidelity_data.fidelity[i]});
            CsvWriter e(dir / "entropy.csv", {"t", "entropy"});
            for (std::size_t i = 0; i < rec.entropy_data.times.size(); ++i)
                e.row_values({rec.entropy_data.times[i], rec.entropy_data.entropy[i]});
            break;
        }
        case ExperimentKind::ClosedFormEe: {
            CsvWriter c(dir / "closed_form.csv", {"L", "k", "entropy", "bound"});
            for (const auto& cf : rec.closed_form)
                c.row({std::to_string(cf.L), std::to_string(cf.L / 4), format_sci(cf.entropy),
                       format_sci(cf.bound)});
            break;
        }
        case ExperimentKind::Verify:
            break;  // report lives in the provenance / verify_report JSON
    }

    nlohmann::json prov;
    prov["config"] = rec.config.serialize();
    prov["seed"] = rec.config.seed;
    prov["library_version"] = version();
    prov["wall_time_s"] = rec.wall_time_s;
    prov["summary"] = rec.summary;
    write_json(dir / "provenance.json", prov);
    if (rec.config.experiment == ExperimentKind::Verify)
        write_json(dir / "verify_report.json", rec.summary);
}

/// Gnuplot-ready columnar files (space separated), one per figure panel.
inline void emit_plot_data(const ExperimentRecord& rec) {
    namespace fs = std::filesystem;
    const fs::path dir(rec.config.out_dir);
    ensure_directory(dir);

    auto open = [&](const char* name, const char* header) {
        std::ofstream out(dir / name);
        out << "# " << header << "\n";
        return out;
    };

    switch (rec.config.experiment) {
        case ExperimentKind::LevelStats: {
            // 50-bin histogram of pooled normalized spacings over [0, 4].
            constexpr int kBins = 50;
            constexpr double kLo = 0.0, kHi = 4.0;
            std::array<double, kBins> counts{};
            std::size_t total = 0;
            for (const auto& st : rec.stats)
                for (double s : st.spacings) {
                    ++total;
                    if (s >= kLo && s < kHi)
                        counts[static_cast<int>((s - kLo) / (kHi - kLo) * kBins)] += 1.0;
                }
            const double width = (kHi - kLo) / kBins;
            auto out = open("plot_levelstats.dat", "s density poisson wigner_dyson");
            for (int b = 0; b < kBins; ++b) {
                const double mid = kLo + (b + 0.5) * width;
                const double density = counts[b] / (total * width);
                out << format_sci(mid) << ' ' << format_sci(density) << ' '
                    << format_sci(reference_pdf(ReferenceDistribution::Poisson, mid)) << ' '
                    << format_sci(reference_pdf(ReferenceDistribution::WignerDyson, mid)) << '\n';
            }
            break;
        }
        case ExperimentKind::EeScatter: {
            auto out = open("plot_ee_scatter.dat", "energy entropy scar_tag");
            for (const auto& p : rec.scatter)
                out << format_sci(p.energy) << ' ' << format_sci(p.entropy) << ' '
                    << static_cast<int>(p.tag.kind) << '\n';
            break;
        }
        case ExperimentKind::Dynamics: {
            auto out = open("plot_dynamics.dat", "t fidelity entropy");
            for (std::size_t i = 0; i < rec.fidelity_data.times.size(); ++i)
                out << format_sci(rec.fidelity_data.times[i]) << ' '
                    << format_sci(rec.fidelity_data.fidelity[i]) << ' '
                    << format_sci(rec.entropy_data.entropy[i]) << '\n';
            break;
        }
        case ExperimentKind::ClosedFormEe: {
            auto out = open("plot_closed_form.dat", "L entropy bound");
            for (const auto& cf : rec.closed_form)
                out << cf.L << ' ' << format_sci(cf.entropy) << ' ' << format_sci(cf.bound) << '\n';
            break;
        }
        case ExperimentKind::Verify:
            break;
    }
}

/// Run one experiment end to end: compute, write CSV/JSON artifacts and the
/// plot data, and return the in-memory record.
inline ExperimentRecord run(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentRecord rec;
    rec.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();
    switch (cfg.experiment) {
        case ExperimentKind::LevelStats: run_levelstats(cfg, rec); break;
        case ExperimentKind::EeScatter: run_ee_scatter(cfg, rec); break;
        case ExperimentKind::Dynamics: run_dynamics(cfg, rec); break;
        case ExperimentKind::ClosedFormEe: run_closed_form(cfg, rec); break;
        case ExperimentKind::Verify: run_verify(cfg, rec); break;
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record_files(rec);
    emit_plot_data(rec);
    return rec;
}

}  // namespace clockscar
