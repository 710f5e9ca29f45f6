#pragma once

// Full-batch Adam training of a rational network on samples of
// g(x, y) = 1/(x + y) + 1/(x - y).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "network.hpp"

namespace ratnet {

struct AllPointsSkipped : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    double exclusion_radius = 0.0;
};

double pole_target(double x, double y);

/// 21 x 21 lattice on [-1, 1]^2 (spacing 0.1) without the points on or within
/// exclusion_radius of the lines x + y = 0 and x - y = 0.
Dataset sample_lattice(double exclusion_radius = 0.0);

/// Entries of W_k uniform on +-sqrt(6 / (fan_in + fan_out)).
Weights<double> xavier_init(const Architecture& arch, std::uint64_t seed);

struct LossAndGrad {
    double loss = 0.0;
    std::vector<Matrix<double>> grads;
    std::size_t skipped = 0;
};

/// Mean squared error over the batch and its gradient by reverse accumulation.
/// Points with a pre-activation below pole_guard in magnitude are skipped.
LossAndGrad forward_backward(const Weights<double>& w, const Dataset& batch, double pole_guard = 1e-9);

struct AdamState {
    std::vector<Matrix<double>> m, v;
    std::uint64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    static AdamState zeros_like(const Weights<double>& w);
};

void adam_step(AdamState& s, Weights<double>& w, const std::vector<Matrix<double>>& grads, double lr);

/// For each true line normal (1,1)/sqrt2 and (1,-1)/sqrt2, the smallest angle
/// in degrees to any row of W_1, ignoring sign.
std::vector<double> singularity_recovery_score(const Weights<double>& w);

struct TrainConfig {
    Architecture arch{std::vector<std::size_t>{2, 2, 1}};
    double lr = 1e-3;
    std::size_t epochs = 20000;
    std::uint64_t seed = 0;
    std::optional<double> clip;
    double exclusion_radius = 0.0;
    double success_loss = 1e-3;
    double success_angle_deg = 5.0;
    std::size_t snapshot_every = 0;
};

struct TrainResult {
    std::size_t run = 0;
    std::vector<double> loss_curve;
    std::vector<std::size_t> skipped;
    Weights<double> initial, final_weights;
    std::vector<std::pair<std::size_t, Weights<double>>> snapshots;
    std::vector<double> angles;
    double final_loss = 0.0;
    bool full_success = false;
    bool partial_success = false;
    bool converged = false;
    std::string error;
};

TrainResult train_run(const TrainConfig& cfg, const Dataset& data, const Weights<double>& init);

struct ExperimentSummary {
    std::vector<TrainResult> runs;
    std::size_t full_successes = 0;
    std::size_t partial_successes = 0;
};

/// n_inits independent runs, run r initialised with xavier_init(arch, derive_seed(seed, r)).
ExperimentSummary run_experiment(const TrainConfig& cfg, std::size_t n_inits, unsigned workers = 1,
                                 const std::function<void(const TrainResult&)>& progress = {});

std::string run_csv(const TrainResult& r);
std::string aggregate_csv(const ExperimentSummary& s);

/// The weights that reproduce the target exactly.
Weights<double> oracle_weights();

}  // namespace ratnet
