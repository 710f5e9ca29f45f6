#include "train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace ratnet {

double pole_target(double x, double y) { return 1.0 / (x + y) + 1.0 / (x - y); }

Dataset sample_lattice(double exclusion_radius) {
    if (!(exclusion_radius >= 0.0 && exclusion_radius < 1.0))
        throw std::invalid_argument("sample_lattice: exclusion radius must lie in [0, 1)");
    Dataset d;
    d.exclusion_radius = exclusion_radius;
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            if (i == j || i + j == 20) continue;  // exactly on x = y or x = -y
            const double x = -1.0 + 0.1 * i, y = -1.0 + 0.1 * j;
            const double dist = std::min(std::abs(x + y), std::abs(x - y)) / std::numbers::sqrt2;
            if (dist <= exclusion_radius) continue;
            d.inputs.push_back({x, y});
            d.targets.push_back(pole_target(x, y));
        }
    }
    return d;
}

Weights<double> xavier_init(const Architecture& arch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Weights<double> w;
    w.arch = arch;
    for (std::size_t k = 0; k < arch.L(); ++k) {
        const double bound = std::sqrt(6.0 / static_cast<double>(arch.dims[k] + arch.dims[k + 1]));
        std::uniform_real_distribution<double> u(-bound, bound);
        Matrix<double> m(arch.dims[k + 1], arch.dims[k]);
        for (double& v : m.data()) v = u(rng);
        w.mats.push_back(std::move(m));
    }
    return w;
}

LossAndGrad forward_backward(const Weights<double>& w, const Dataset& batch, double pole_guard) {
    w.validate();
    const std::size_t L = w.arch.L(), out_dim = w.arch.output_dim();
    LossAndGrad out;
    for (const auto& m : w.mats) out.grads.emplace_back(m.rows(), m.cols());
    // acts[k] is the input of layer k+1; buffers are reused across points.
    std::vector<std::vector<double>> acts(L);
    for (std::size_t k = 0; k < L; ++k) acts[k].resize(w.arch.dims[k]);
    std::vector<double> h, delta, up;
    std::size_t used = 0;
    double sse = 0.0;
    for (std::size_t p = 0; p < batch.inputs.size(); ++p) {
        std::copy(batch.inputs[p].begin(), batch.inputs[p].end(), acts[0].begin());
        bool pole = false;
        for (std::size_t k = 0; k < L && !pole; ++k) {
            const Matrix<double>& W = w.mats[k];
            h.assign(W.rows(), 0.0);
            for (std::size_t i = 0; i < W.rows(); ++i)
                for (std::size_t j = 0; j < W.cols(); ++j) h[i] += W(i, j) * acts[k][j];
            if (k + 1 == L) break;
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (std::abs(h[i]) < pole_guard) pole = true;
                acts[k + 1][i] = 1.0 / h[i];
            }
        }
        if (pole) {
            ++out.skipped;
            continue;
        }
        ++used;
        // Gradients are accumulated unscaled and divided by the point count at the end.
        delta.resize(out_dim);
        for (std::size_t o = 0; o < out_dim; ++o) {
            const double r = h[o] - batch.targets[p * out_dim + o];
            sse += r * r;
            delta[o] = 2.0 * r;
        }
        for (std::size_t k = L; k-- > 0;) {
            Matrix<double>& g = out.grads[k];
            const auto& a = acts[k];
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) += delta[i] * a[j];
            if (k == 0) break;
            // Back through W_k, then through 1/z whose derivative is -1/z^2 = -a^2.
            const Matrix<double>& W = w.mats[k];
            up.assign(W.cols(), 0.0);
            for (std::size_t i = 0; i < W.rows(); ++i)
                for (std::size_t j = 0; j < W.cols(); ++j) up[j] += W(i, j) * delta[i];
            for (std::size_t j = 0; j < up.size(); ++j) up[j] *= -a[j] * a[j];
            delta.swap(up);
        }
    }
    if (used == 0) throw AllPointsSkipped("forward_backward: every point is at a pole of the network");
    const double count = static_cast<double>(used * out_dim);
    out.loss = sse / count;
    for (auto& g : out.grads)
        for (double& v : g.data()) v /= count;
    return out;
}

AdamState AdamState::zeros_like(const Weights<double>& w) {
    AdamState s;
    for (const auto& m : w.mats) {
        s.m.emplace_back(m.rows(), m.cols());
        s.v.emplace_back(m.rows(), m.cols());
    }
    return s;
}

void adam_step(AdamState& s, Weights<double>& w, const std::vector<Matrix<double>>& grads, double lr) {
    if (grads.size() != w.mats.size() || s.m.size() != w.mats.size()) throw ShapeError("adam_step: shape mismatch");
    ++s.t;
    const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
    const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
    for (std::size_t k = 0; k < w.mats.size(); ++k) {
        auto& W = w.mats[k].data();
        auto& m = s.m[k].data();
        auto& v = s.v[k].data();
        const auto& g = grads[k].data();
        for (std::size_t e = 0; e < W.size(); ++e) {
            m[e] = s.beta1 * m[e] + (1.0 - s.beta1) * g[e];
            v[e] = s.beta2 * v[e] + (1.0 - s.beta2) * g[e] * g[e];
            W[e] -= lr * (m[e] / c1) / (std::sqrt(v[e] / c2) + s.eps);
        }
    }
}

std::vector<double> singularity_recovery_score(const Weights<double>& w) {
    if (w.mats.empty() || w.mats[0].cols() != 2) throw ShapeError("singularity_recovery_score: needs two inputs");
    const double r = std::numbers::sqrt2 / 2.0;
    const double normals[2][2] = {{r, r}, {r, -r}};
    std::vector<double> out;
    for (const auto& nrm : normals) {
        double best = 90.0;
        for (std::size_t i = 0; i < w.mats[0].rows(); ++i) {
            const double a = w.mats[0](i, 0), b = w.mats[0](i, 1);
            const double len = std::hypot(a, b);
            if (len == 0.0) continue;
            const double c = std::min(1.0, std::abs(a * nrm[0] + b * nrm[1]) / len);
            best = std::min(best, std::acos(c) * 180.0 / std::numbers::pi);
        }
        out.push_back(best);
    }
    return out;
}

TrainResult train_run(const TrainConfig& cfg, const Dataset& data, const Weights<double>& init) {
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
    if (cfg.epochs < 1) throw std::invalid_argument("train: need at least one epoch");
    TrainResult r;
    r.initial = init;
    Weights<double> w = init;
    AdamState s = AdamState::zeros_like(w);
    r.loss_curve.reserve(cfg.epochs);
    r.skipped.reserve(cfg.epochs);
    double last = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        LossAndGrad lg;
        try {
            lg = forward_backward(w, data);
        } catch (const AllPointsSkipped& ex) {
            r.error = ex.what();
            r.loss_curve.resize(cfg.epochs, std::numeric_limits<double>::quiet_NaN());
            r.skipped.resize(cfg.epochs, data.inputs.size());
            break;
        }
        r.loss_curve.push_back(lg.loss);
        r.skipped.push_back(lg.skipped);
        if (!std::isfinite(lg.loss)) {
            r.error = "loss is not finite";
            r.loss_curve.resize(cfg.epochs, std::numeric_limits<double>::quiet_NaN());
            r.skipped.resize(cfg.epochs, 0);
            break;
        }
        if (cfg.clip) {
            double nrm = 0.0;
            for (const auto& g : lg.grads)
                for (double v : g.data()) nrm += v * v;
            nrm = std::sqrt(nrm);
            if (nrm > *cfg.clip)
                for (auto& g : lg.grads)
                    for (double& v : g.data()) v *= *cfg.clip / nrm;
        }
        adam_step(s, w, lg.grads, cfg.lr);
        if (cfg.snapshot_every && (e + 1) % cfg.snapshot_every == 0) r.snapshots.emplace_back(e + 1, w);
    }
    if (r.error.empty()) {
        try {
            last = forward_backward(w, data).loss;
        } catch (const AllPointsSkipped& ex) {
            r.error = ex.what();
        }
    }
    r.final_weights = w;
    r.final_loss = last;
    r.angles = singularity_recovery_score(w);
    r.full_success = std::isfinite(last) && last < cfg.success_loss;
    r.partial_success = std::any_of(r.angles.begin(), r.angles.end(), [&](double a) { return a < cfg.success_angle_deg; });
    r.converged = r.full_success;
    return r;
}

ExperimentSummary run_experiment(const TrainConfig& cfg, std::size_t n_inits, unsigned workers,
                                 const std::function<void(const TrainResult&)>& progress) {
    if (n_inits < 1) throw std::invalid_argument("run_experiment: need at least one initialisation");
    const Dataset data = sample_lattice(cfg.exclusion_radius);
    ExperimentSummary s;
    s.runs.resize(n_inits);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < n_inits; i = next++) {
            TrainResult r = train_run(cfg, data, xavier_init(cfg.arch, derive_seed(cfg.seed, i)));
            r.run = i;
            if (progress) {
                std::lock_guard<std::mutex> lock(mu);
                progress(r);
            }
            s.runs[i] = std::move(r);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, workers); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& r : s.runs) {
        s.full_successes += r.full_success;
        s.partial_successes += r.partial_success;
    }
    return s;
}

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string run_csv(const TrainResult& r) {
    std::ostringstream os;
    os << "epoch,loss,skipped\n";
    for (std::size_t e = 0; e < r.loss_curve.size(); ++e) os << e + 1 << ',' << num(r.loss_curve[e]) << ',' << r.skipped[e] << '\n';
    return os.str();
}

std::string aggregate_csv(const ExperimentSummary& s) {
    std::ostringstream os;
    os << "run,final_loss,angle1,angle2,full_success,partial_success\n";
    for (const auto& r : s.runs) {
        os << r.run << ',' << num(r.final_loss) << ',' << num(r.angles.at(0)) << ',' << num(r.angles.at(1)) << ','
           << (r.full_success ? "true" : "false") << ',' << (r.partial_success ? "true" : "false") << '\n';
    }
    return os.str();
}

Weights<double> oracle_weights() {
    Weights<double> w;
    w.arch = Architecture({2, 2, 1});
    w.mats = {Matrix<double>{{1.0, 1.0}, {1.0, -1.0}}, Matrix<double>{{1.0, 1.0}}};
    return w;
}

}  // namespace ratnet
