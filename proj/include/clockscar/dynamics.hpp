#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "clockscar/eigensolve.hpp"
#include "clockscar/entanglement.hpp"

namespace clockscar {

// ---------------------------------------------------------------------------
// Exact unitary time evolution by spectral resolution. No integrators: the
// perfect-revival checks leave no room for time-stepping error.
// ---------------------------------------------------------------------------

struct DynamicsTrace {
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<double> entropy;
    std::string initial_state_label;
};

namespace detail {

/// Coefficients of the state in the eigenbasis, restricted to the sector if
/// the decomposition is sector-blocked. Throws when the state leaks outside.
inline Eigen::VectorXcd eigenbasis_coefficients(const Eigen::VectorXcd& state,
                                                const EigenDecomposition& dec) {
    if (!dec.has_vectors) throw std::runtime_error("evolve: eigenvectors not retained");
    Eigen::VectorXcd y = dec.overlaps(state);
    if (!dec.sector_indices.empty()) {
        const double inside = y.squaredNorm();
        if (std::abs(inside - state.squaredNorm()) > 1e-10)
            throw std::invalid_argument("evolve: state has weight outside the decomposed sector");
    }
    return y;
}

inline Eigen::VectorXcd from_eigenbasis(const Eigen::VectorXcd& y, const EigenDecomposition& dec) {
    Eigen::VectorXcd s(dec.size());
    if (dec.real_vectors) {
        Eigen::VectorXd re = dec.vectors_real * y.real();
        Eigen::VectorXd im = dec.vectors_real * y.imag();
        s.real() = re;
        s.imag() = im;
    } else {
        s = dec.vectors_complex * y;
    }
    if (dec.sector_indices.empty()) return s;
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(dec.full_dimension);
    for (Eigen::Index k = 0; k < s.size(); ++k) full(dec.sector_indices[k]) = s(k);
    return full;
}

}  // namespace detail

/// e^{-iHt} |state> through the retained eigensystem.
inline Eigen::VectorXcd evolve(const Eigen::VectorXcd& state, const EigenDecomposition& dec,
                               double t) {
    Eigen::VectorXcd y = detail::eigenbasis_coefficients(state, dec);
    for (Eigen::Index k = 0; k < y.size(); ++k)
        y(k) *= std::exp(Complex(0.0, -dec.eigenvalues(k) * t));
    return detail::from_eigenbasis(y, dec);
}

/// F(t) = |<phi| e^{iHt} |phi>| on the time grid; O(N) per grid point once
/// the eigenbasis weights are known.
inline DynamicsTrace fidelity_trace(const Eigen::VectorXcd& initial, const EigenDecomposition& dec,
                                    const std::vector<double>& times) {
    Eigen::VectorXcd y = detail::eigenbasis_coefficients(initial, dec);
    Eigen::VectorXd w = y.cwiseAbs2();
    DynamicsTrace out;
    out.times = times;
    out.fidelity.reserve(times.size());
    for (double t : times) {
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < w.size(); ++k)
            acc += w(k) * std::exp(Complex(0.0, -dec.eigenvalues(k) * t));
        out.fidelity.push_back(std::abs(acc));
    }
    return out;
}

/// Half-chain entropy along the evolution.
inline DynamicsTrace ee_trace(const Eigen::VectorXcd& initial, const EigenDecomposition& dec,
                              const std::vector<double>& times, int cut, int n, int L) {
    Eigen::VectorXcd y0 = detail::eigenbasis_coefficients(initial, dec);
    DynamicsTrace out;
    out.times = times;
    out.entropy.reserve(times.size());
    Eigen::VectorXcd y(y0.size());
    for (double t : times) {
        for (Eigen::Index k = 0; k < y.size(); ++k)
            y(k) = y0(k) * std::exp(Complex(0.0, -dec.eigenvalues(k) * t));
        out.entropy.push_back(von_neumann_ee(detail::from_eigenbasis(y, dec), n, L, cut));
    }
    return out;
}

/// Uniform grid of `points` samples over [0, periods * T].
inline std::vector<double> default_time_grid(double period, int periods = 5, int points = 400) {
    std::vector<double> t(points);
    const double span = period * periods;
    for (int i = 0; i < points; ++i) t[i] = span * i / (points - 1);
    return t;
}

/// Revival period of the coherent state under the Zeeman field, 2 pi / (n h).
inline double revival_period(int n, double h) { return 2.0 * M_PI / (n * std::abs(h)); }

}  // namespace clockscar
