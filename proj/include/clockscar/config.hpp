#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace clockscar {

// ---------------------------------------------------------------------------
// Plain-text experiment configuration: one `key = value` pair per line,
// '#' comments. Serialization round-trips losslessly.
// ---------------------------------------------------------------------------

enum class ExperimentKind { LevelStats, EeScatter, Dynamics, ClosedFormEe, Verify };

enum class CouplingMode { RandomUniform, Explicit, Zero };

enum class PerturbationKind { Window3, Window5 };

struct InitialStateSpec {
    enum class Kind { Coherent, TwoParam, Tower, Basis, Random };
    Kind kind = Kind::Coherent;
    std::complex<double> beta{0.5, 0.0};
    std::complex<double> alpha{0.0, 0.0};
    int tower_k = 0;
    std::string basis_digits;

    std::string to_string() const;
    static InitialStateSpec parse(const std::string& text);
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Verify;
    int n = 2;
    int L = 8;
    double h = 1.0;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;

    CouplingMode coupling_mode = CouplingMode::RandomUniform;
    std::array<bool, 3> channels = {true, false, false};  // n = 2 channels c1..c3
    bool include_last_projector = false;                  // n = 3
    PerturbationKind pert_kind = PerturbationKind::Window3;
    std::array<std::vector<double>, 3> explicit_couplings;

    std::optional<double> sector;
    int realizations = 1;

    InitialStateSpec initial_state;
    int time_periods = 5;
    int time_points = 400;
    std::optional<int> cut;

    int closed_form_max_l = 64;

    int resolved_cut() const { return cut.value_or(L / 2); }

    void validate() const;
    std::string serialize() const;
    static ExperimentConfig parse(const std::string& text);
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(trim(item));
    return out;
}

inline std::complex<double> parse_complex(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    // forms: "a", "a+bi", "a-bi", "bi"
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign or leading sign
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                double re = std::stod(s.substr(0, k));
                double im = std::stod(s[k] == '+' ? s.substr(k + 1) : s.substr(k));
                return {re, im};
            }
        }
        return {0.0, std::stod(s)};
    }
    return {std::stod(s), 0.0};
}

inline std::string complex_to_string(std::complex<double> z) {
    std::ostringstream ss;
    ss.precision(17);
    if (z.imag() == 0.0) {
        ss << z.real();
    } else {
        ss << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i";
    }
    return ss.str();
}

inline std::string doubles_to_string(const std::vector<double>& v) {
    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) ss << ',';
        ss << v[i];
    }
    return ss.str();
}

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("bad boolean value: " + s);
}

}  // namespace detail

inline std::string InitialStateSpec::to_string() const {
    using detail::complex_to_string;
    switch (kind) {
        case Kind::Coherent: return "coherent(" + complex_to_string(beta) + ")";
        case Kind::TwoParam:
            return "two_param(" + complex_to_string(alpha) + "," + complex_to_string(beta) + ")";
        case Kind::Tower: return "tower(" + std::to_string(tower_k) + ")";
        case Kind::Basis: return "basis(" + basis_digits + ")";
        case Kind::Random: return "random";
    }
    return "random";
}

inline InitialStateSpec InitialStateSpec::parse(const std::string& text) {
    const std::string s = detail::trim(text);
    InitialStateSpec out;
    auto args_of = [&](const std::string& name) -> std::string {
        if (s.size() < name.size() + 2 || s.compare(0, name.size(), name) != 0 ||
            s[name.size()] != '(' || s.back() != ')')
            throw std::invalid_argument("bad initial_state: " + s);
        return s.substr(name.size() + 1, s.size() - name.size() - 2);
    };
    if (s == "random") {
        out.kind = Kind::Random;
    } else if (s.rfind("coherent", 0) == 0) {
        out.kind = Kind::Coherent;
        out.beta = detail::parse_complex(args_of("coherent"));
    } else if (s.rfind("two_param", 0) == 0) {
        out.kind = Kind::TwoParam;
        auto parts = detail::split(args_of("two_param"), ',');
        if (parts.size() != 2) throw std::invalid_argument("two_param needs two arguments");
        out.alpha = detail::parse_complex(parts[0]);
        out.beta = detail::parse_complex(parts[1]);
    } else if (s.rfind("tower", 0) == 0) {
        out.kind = Kind::Tower;
        out.tower_k = std::stoi(args_of("tower"));
    } else if (s.rfind("basis", 0) == 0) {
        out.kind = Kind::Basis;
        out.basis_digits = args_of("basis");
    } else {
        throw std::invalid_argument("bad initial_state: " + s);
    }
    return out;
}

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::LevelStats: return "levelstats";
        case ExperimentKind::EeScatter: return "ee_scatter";
        case ExperimentKind::Dynamics: return "dynamics";
        case ExperimentKind::ClosedFormEe: return "closed_form_ee";
        case ExperimentKind::Verify: return "verify";
    }
    return "verify";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "levelstats") return ExperimentKind::LevelStats;
    if (s == "ee_scatter") return ExperimentKind::EeScatter;
    if (s == "dynamics") return ExperimentKind::Dynamics;
    if (s == "closed_form_ee") return ExperimentKind::ClosedFormEe;
    if (s == "verify") return ExperimentKind::Verify;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

inline void ExperimentConfig::validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (L < 2 || L % 2 != 0) throw std::invalid_argument("config: L must be even and >= 2");
    if (!std::isfinite(h)) throw std::invalid_argument("config: h must be finite");
    if (realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (time_points < 2) throw std::invalid_argument("config: time_points must be >= 2");
    if (cut && (*cut < 1 || *cut >= L)) throw std::invalid_argument("config: cut must be in 1..L-1");
    if (pert_kind == PerturbationKind::Window5 && n != 2)
        throw std::invalid_argument("config: window5 perturbation requires n = 2");
    if (experiment == ExperimentKind::ClosedFormEe &&
        (closed_form_max_l < 4 || closed_form_max_l % 4 != 0))
        throw std::invalid_argument("config: closed_form_max_l must be a multiple of 4");
    if (sector && coupling_mode != CouplingMode::Zero && n == 2 && channels[2])
        throw std::invalid_argument("config: sector run requires c3 channel off (U(1) breaking)");
    if (initial_state.kind == InitialStateSpec::Kind::Basis &&
        experiment == ExperimentKind::Dynamics) {
        if (static_cast<int>(initial_state.basis_digits.size()) != L)
            throw std::invalid_argument("config: basis initial state must list L digits");
        for (char c : initial_state.basis_digits)
            if (c < '0' || c >= '0' + n) throw std::invalid_argument("config: bad basis digit");
    }
}

inline std::string ExperimentConfig::serialize() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << "experiment = " << to_string(experiment) << "\n";
    ss << "n = " << n << "\n";
    ss << "L = " << L << "\n";
    ss << "h = " << h << "\n";
    ss << "seed = " << seed << "\n";
    ss << "out = " << out_dir << "\n";
    ss << "threads = " << threads << "\n";
    ss << "coupling_mode = "
       << (coupling_mode == CouplingMode::RandomUniform
               ? "random_uniform"
               : coupling_mode == CouplingMode::Explicit ? "explicit" : "zero")
       << "\n";
    {
        std::string ch;
        const char* names[3] = {"c1", "c2", "c3"};
        for (int i = 0; i < 3; ++i) {
            if (!channels[i]) continue;
            if (!ch.empty()) ch += ",";
            ch += names[i];
        }
        ss << "channels = " << (ch.empty() ? "none" : ch) << "\n";
    }
    ss << "include_last_projector = " << (include_last_projector ? "true" : "false") << "\n";
    ss << "pert_kind = " << (pert_kind == PerturbationKind::Window3 ? "window3" : "window5") << "\n";
    for (int i = 0; i < 3; ++i)
        if (!explicit_couplings[i].empty())
            ss << "c" << (i + 1) << "_values = " << detail::doubles_to_string(explicit_couplings[i])
               << "\n";
    if (sector) ss << "sector = " << *sector << "\n";
    ss << "realizations = " << realizations << "\n";
    ss << "initial_state = " << initial_state.to_string() << "\n";
    ss << "time_periods = " << time_periods << "\n";
    ss << "time_points = " << time_points << "\n";
    if (cut) ss << "cut = " << *cut << "\n";
    ss << "closed_form_max_l = " << closed_form_max_l << "\n";
    return ss.str();
}

inline ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: bad line: " + line);
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("experiment")) cfg.experiment = experiment_kind_from_string(*v);
    if (auto v = take("n")) cfg.n = std::stoi(*v);
    if (auto v = take("L")) cfg.L = std::stoi(*v);
    if (auto v = take("h")) cfg.h = std::stod(*v);
    if (auto v = take("seed")) cfg.seed = std::stoull(*v);
    if (auto v = take("out")) cfg.out_dir = *v;
    if (auto v = take("threads")) cfg.threads = std::stoi(*v);
    if (auto v = take("coupling_mode")) {
        if (*v == "random_uniform") cfg.coupling_mode = CouplingMode::RandomUniform;
        else if (*v == "explicit") cfg.coupling_mode = CouplingMode::Explicit;
        else if (*v == "zero") cfg.coupling_mode = CouplingMode::Zero;
        else throw std::invalid_argument("config: bad coupling_mode: " + *v);
    }
    if (auto v = take("channels")) {
        cfg.channels = {false, false, false};
        if (*v != "none") {
            for (const auto& item : detail::split(*v, ',')) {
                if (item == "c1") cfg.channels[0] = true;
                else if (item == "c2") cfg.channels[1] = true;
                else if (item == "c3") cfg.channels[2] = true;
                else throw std::invalid_argument("config: bad channel: " + item);
            }
        }
    }
    if (auto v = take("include_last_projector")) cfg.include_last_projector = detail::parse_bool(*v);
    if (auto v = take("pert_kind")) {
        if (*v == "window3") cfg.pert_kind = PerturbationKind::Window3;
        else if (*v == "window5") cfg.pert_kind = PerturbationKind::Window5;
        else throw std::invalid_argument("config: bad pert_kind: " + *v);
    }
    for (int i = 0; i < 3; ++i) {
        std::string key = "c" + std::to_string(i + 1) + "_values";
        if (auto v = take(key.c_str())) cfg.explicit_couplings[i] = detail::parse_doubles(*v);
    }
    if (auto v = take("sector")) {
        if (*v != "none") cfg.sector = std::stod(*v);
    }
    if (auto v = take("realizations")) cfg.realizations = std::stoi(*v);
    if (auto v = take("initial_state")) cfg.initial_state = InitialStateSpec::parse(*v);
    if (auto v = take("time_periods")) cfg.time_periods = std::stoi(*v);
    if (auto v = take("time_points")) cfg.time_points = std::stoi(*v);
    if (auto v = take("cut")) cfg.cut = std::stoi(*v);
    if (auto v = take("closed_form_max_l")) cfg.closed_form_max_l = std::stoi(*v);

    if (!kv.empty()) throw std::invalid_argument("config: unknown key: " + kv.begin()->first);
    return cfg;
}

}  // namespace clockscar
