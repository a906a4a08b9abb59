#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msparisi/model.hpp"

namespace msparisi {

/// Non-finite intermediate in a simulation; the message carries the seed.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One draw of the quenched disorder.
struct DisorderSample {
    int N = 0;
    /// g[ell - 1] is the row-major N x N array of standard Gaussians of level ell.
    std::vector<std::vector<double>> g;
    std::vector<double> h;
    std::uint64_t seed = 0;
};

/// Deterministic in (params, N, seed).
DisorderSample draw_disorder(const ModelParams& params, int N, std::uint64_t seed);

/// log Z_{r,N} = log sum_sigma exp(-H_N(sigma) - sum_i h_i sigma_i), with
/// H_N = sum_ell beta_ell sum_{i,j} g_ij sigma_i sigma_j / sqrt(N) (diagonal included).
/// Exact Gray-code enumeration; refuses N > 20.
double exact_log_partition(const ModelParams& params, const DisorderSample& sample);

/// (1/N) log E_g Z_{r,N} for the field in `sample`: every level at exponent 1.
/// Exact enumeration with the Gaussian moment formula, no sampling.
double annealed_log_partition_per_spin(const ModelParams& params, const DisorderSample& sample);

/// Exact p_1 (N = 1): E_h log 2cosh h + sum_ell zeta_{ell-1} beta_ell^2 / 2.
double single_spin_pressure(const ModelParams& params);

struct SimEstimate {
    double mean = 0.0;
    /// Standard error from the variance over outer samples only.
    double std_error = 0.0;
    int n_outer = 0;
    std::vector<int> n_inner;
    std::uint64_t seed = 0;
};

struct SimOptions {
    int N = 10;
    int n_outer = 2000;
    /// Inner sample count per nested level (level ell uses entry ell, the last entry repeats).
    std::vector<int> n_inner{500};
    std::uint64_t seed = 12345;
    /// Nesting deeper than r = 2 is refused unless set.
    bool allow_deep = false;
    /// Scales every beta_ell; 0 switches the couplings off.
    double coupling_scale = 1.0;
};

/// (1/N) E_h log Z_{0,N} by nested Monte Carlo with delete-one jackknife at every level.
/// Outer samples draw the field; inner samples draw the couplings of the next level. N <= 14.
SimEstimate nested_pressure(const ModelParams& params, const SimOptions& opts);

/// E_h < <q^2>^{(ell)} >^{(0)} = tilted average of (1/N^2) sum_ij (<sigma_i sigma_j>^{(ell)})^2,
/// 0 <= ell <= r, with the same nesting and jackknife as nested_pressure.
SimEstimate overlap_moment_sim(const ModelParams& params, int ell, const SimOptions& opts);

}  // namespace msparisi
