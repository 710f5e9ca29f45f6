#include "ratnet/ratnet.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "factor.hpp"
#include "geometry.hpp"
#include "polyjson.hpp"
#include "reconstruct.hpp"
#include "train.hpp"

using namespace ratnet;

struct ratnet_poly {
    AnyPoly p;
};
struct ratnet_weights {
    AnyWeights w;
};
struct ratnet_tuple {
    AnyTuple t;
};

namespace {

thread_local std::string g_last_error;

ratnet_status fail(ratnet_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
ratnet_status guarded(F&& f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const ParseError& e) {
        return fail(RATNET_ERR_PARSE, e.what());
    } catch (const json::exception& e) {
        return fail(RATNET_ERR_PARSE, e.what());
    } catch (const ShapeError& e) {
        return fail(RATNET_ERR_SHAPE, e.what());
    } catch (const NotDivisible& e) {
        return fail(RATNET_ERR_NOT_DIVISIBLE, e.what());
    } catch (const Timeout& e) {
        return fail(RATNET_ERR_TIMEOUT, e.what());
    } catch (const NonConvergence& e) {
        return fail(RATNET_ERR_NUMERIC, e.what());
    } catch (const AllPointsSkipped& e) {
        return fail(RATNET_ERR_NUMERIC, e.what());
    } catch (const FieldMismatch& e) {
        return fail(RATNET_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(RATNET_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(RATNET_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(RATNET_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(RATNET_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RATNET_ERR_INTERNAL, "unknown exception");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define RATNET_REQUIRE(cond, msg) \
    if (!(cond)) return fail(RATNET_ERR_INVALID_ARGUMENT, msg)

json factor_report_json(const FactorReport& r) {
    json j;
    j["decomposable"] = r.decomposable;
    j["all_real"] = r.all_real;
    j["failure_reason"] = to_string(r.failure);
    j["changes_of_variables"] = r.changes_of_variables;
    if (r.factorization) {
        j["constant"] = complex_to_json(r.factorization->constant);
        j["residual"] = r.factorization->residual;
        j["factors"] = json::array();
        for (const auto& f : r.factorization->factors) {
            json row = json::array();
            for (const cplx& c : f) row.push_back(complex_to_json(c));
            j["factors"].push_back(std::move(row));
        }
    } else {
        j["constant"] = nullptr;
        j["residual"] = nullptr;
        j["factors"] = json::array();
    }
    return j;
}

json verdict_json(const MembershipVerdict& v, const char* method) {
    json j;
    j["method"] = method;
    j["in_model"] = v.in_model;
    j["stage_failed"] = to_string(v.stage_failed);
    j["residual"] = v.residual;
    j["necessary_only"] = v.necessary_only;
    if (!v.detail.empty()) j["detail"] = v.detail;
    j["weights"] = v.weights ? to_json(*v.weights) : json(nullptr);
    return j;
}

json dimension_json(const DimensionReport& r) {
    json j;
    j["arch"] = r.arch.dims;
    j["jacobian_rank"] = r.jacobian_rank;
    j["ambient_dim"] = r.ambient_dim;
    j["param_count"] = r.param_count;
    j["conjectured_dim"] = r.conjectured_dim;
    if (r.conjectured_dim_max != r.conjectured_dim) j["conjectured_dim_max_form"] = r.conjectured_dim_max;
    j["match"] = r.jacobian_rank == r.conjectured_dim;
    j["prime"] = r.prime;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["runtime_seconds"] = r.runtime_seconds;
    j["status"] = r.status;
    return j;
}

ReconstructOptions reconstruct_options(const ratnet_reconstruct_options* opt) {
    ReconstructOptions o;
    if (opt) {
        if (opt->tol > 0) o.tol = opt->tol;
        o.real_only = opt->real_only != 0;
        o.factor.seed = opt->seed;
    }
    return o;
}

// Number of variables, number of numerators and degrees against the architecture.
bool shapes_match(const RationalTuple<cplx>& t, const Architecture& a) {
    const DegreeProfile d = degrees(a);
    if (t.nvars() != a.input_dim() || t.numerators.size() != a.output_dim() || t.denominator.degree() != d.m)
        return false;
    for (const auto& p : t.numerators)
        if (p.nvars() != a.input_dim() || (!p.is_zero() && p.degree() != d.n)) return false;
    return true;
}

}  // namespace

extern "C" {

const char* ratnet_version(void) { return "1.0.0"; }

const char* ratnet_last_error(void) { return g_last_error.c_str(); }

const char* ratnet_status_name(ratnet_status s) {
    switch (s) {
        case RATNET_OK: return "ok";
        case RATNET_ERR_INVALID_ARGUMENT: return "invalid argument";
        case RATNET_ERR_SHAPE: return "shape mismatch";
        case RATNET_ERR_DOMAIN: return "domain error";
        case RATNET_ERR_NOT_DIVISIBLE: return "not divisible";
        case RATNET_ERR_NUMERIC: return "numerical failure";
        case RATNET_ERR_PARSE: return "parse error";
        case RATNET_ERR_IO: return "i/o error";
        case RATNET_ERR_TIMEOUT: return "timeout";
        case RATNET_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void ratnet_string_free(char* s) { std::free(s); }

ratnet_status ratnet_set_cleanup_threshold(double rel) {
    return guarded([&] {
        set_cleanup_threshold(rel);
        return RATNET_OK;
    });
}

ratnet_status ratnet_poly_from_json(const char* text, ratnet_poly** out) {
    RATNET_REQUIRE(text && out, "null argument");
    return guarded([&] {
        *out = new ratnet_poly{poly_from_json(json::parse(text))};
        return RATNET_OK;
    });
}

ratnet_status ratnet_poly_to_json(const ratnet_poly* p, char** out) {
    RATNET_REQUIRE(p && out, "null argument");
    return guarded([&] {
        *out = dup_string(to_json(p->p).dump());
        return RATNET_OK;
    });
}

void ratnet_poly_free(ratnet_poly* p) { delete p; }

ratnet_status ratnet_poly_mul(const ratnet_poly* a, const ratnet_poly* b, ratnet_poly** out) {
    RATNET_REQUIRE(a && b && out, "null argument");
    return guarded([&] {
        if (a->p.index() != b->p.index()) throw FieldMismatch("poly_mul: operands live in different fields");
        AnyPoly r = std::visit(
            [&](const auto& x) -> AnyPoly {
                using P = std::decay_t<decltype(x)>;
                return x * std::get<P>(b->p);
            },
            a->p);
        *out = new ratnet_poly{std::move(r)};
        return RATNET_OK;
    });
}

ratnet_status ratnet_poly_evaluate(const ratnet_poly* p, const double* re, const double* im, size_t n, double* out_re,
                                   double* out_im) {
    RATNET_REQUIRE(p && (re || n == 0) && out_re, "null argument");
    return guarded([&] {
        if (p->p.index() == 2) throw std::invalid_argument("poly_evaluate: GF(p) polynomials are not evaluated numerically");
        std::vector<cplx> x(n);
        for (size_t i = 0; i < n; ++i) x[i] = cplx(re[i], im ? im[i] : 0.0);
        const cplx v = to_complex(p->p).evaluate(x);
        *out_re = v.real();
        if (out_im) *out_im = v.imag();
        return RATNET_OK;
    });
}

ratnet_status ratnet_weights_from_json(const char* text, ratnet_weights** out) {
    RATNET_REQUIRE(text && out, "null argument");
    return guarded([&] {
        *out = new ratnet_weights{weights_from_json(json::parse(text))};
        return RATNET_OK;
    });
}

ratnet_status ratnet_weights_to_json(const ratnet_weights* w, char** out) {
    RATNET_REQUIRE(w && out, "null argument");
    return guarded([&] {
        *out = dup_string(to_json(w->w).dump());
        return RATNET_OK;
    });
}

void ratnet_weights_free(ratnet_weights* w) { delete w; }

ratnet_status ratnet_weights_random(const char* arch, const char* field, uint64_t seed, uint64_t prime,
                                    ratnet_weights** out) {
    RATNET_REQUIRE(arch && out, "null argument");
    return guarded([&] {
        const Architecture a = Architecture::parse(arch);
        const std::string f = field ? field : "real";
        if (f == "real")
            *out = new ratnet_weights{random_real_weights(a, seed)};
        else if (f == "complex")
            *out = new ratnet_weights{random_complex_weights(a, seed)};
        else if (f == "gfp")
            *out = new ratnet_weights{random_gfp_weights(a, seed, prime ? prime : kDefaultPrime)};
        else
            throw std::invalid_argument("unknown field '" + f + "'");
        return RATNET_OK;
    });
}

ratnet_status ratnet_tuple_from_json(const char* text, ratnet_tuple** out) {
    RATNET_REQUIRE(text && out, "null argument");
    return guarded([&] {
        *out = new ratnet_tuple{tuple_from_json(json::parse(text))};
        return RATNET_OK;
    });
}

ratnet_status ratnet_tuple_to_json(const ratnet_tuple* t, char** out) {
    RATNET_REQUIRE(t && out, "null argument");
    return guarded([&] {
        *out = dup_string(to_json(t->t).dump());
        return RATNET_OK;
    });
}

void ratnet_tuple_free(ratnet_tuple* t) { delete t; }

size_t ratnet_tuple_num_outputs(const ratnet_tuple* t) {
    if (!t) return 0;
    return std::visit([](const auto& x) { return x.numerators.size(); }, t->t);
}

ratnet_status ratnet_degrees(const char* arch, uint32_t* n, uint32_t* m) {
    RATNET_REQUIRE(arch && n && m, "null argument");
    return guarded([&] {
        const DegreeProfile d = degrees(Architecture::parse(arch));
        *n = d.n;
        *m = d.m;
        return RATNET_OK;
    });
}

ratnet_status ratnet_param_count(const char* arch, uint64_t* out) {
    RATNET_REQUIRE(arch && out, "null argument");
    return guarded([&] {
        *out = param_count(Architecture::parse(arch));
        return RATNET_OK;
    });
}

ratnet_status ratnet_ambient_dim(const char* arch, uint64_t* out) {
    RATNET_REQUIRE(arch && out, "null argument");
    return guarded([&] {
        *out = ambient_dim(Architecture::parse(arch));
        return RATNET_OK;
    });
}

ratnet_status ratnet_forward(const ratnet_weights* w, int binary, ratnet_tuple** out) {
    RATNET_REQUIRE(w && out, "null argument");
    return guarded([&] {
        AnyTuple t = std::visit(
            [&](const auto& x) -> AnyTuple { return binary ? forward_binary(x) : forward_recursive(x); }, w->w);
        *out = new ratnet_tuple{std::move(t)};
        return RATNET_OK;
    });
}

ratnet_status ratnet_tuple_check(const ratnet_tuple* t, uint64_t seed, char** out) {
    RATNET_REQUIRE(t && out, "null argument");
    return guarded([&] {
        json j;
        j["common_factor_suspected"] = t->t.index() == 2 ? json(nullptr) : json(common_factor_suspected(to_complex(t->t), seed));
        *out = dup_string(j.dump());
        return RATNET_OK;
    });
}

ratnet_status ratnet_eval(const ratnet_weights* w, const double* x_re, const double* x_im, size_t n, double* out_re,
                          double* out_im, size_t out_len) {
    RATNET_REQUIRE(w && x_re && out_re, "null argument");
    return guarded([&] {
        if (w->w.index() == 0) {
            const auto& rw = std::get<0>(w->w);
            if (x_im)
                for (size_t i = 0; i < n; ++i)
                    if (x_im[i] != 0.0) throw std::invalid_argument("eval: complex input for real weights");
            const auto y = eval_network(rw, std::span<const double>(x_re, n));
            if (out_len < y.size()) throw ShapeError("eval: output buffer too small");
            for (size_t i = 0; i < y.size(); ++i) {
                out_re[i] = y[i];
                if (out_im) out_im[i] = 0.0;
            }
        } else if (w->w.index() == 1) {
            std::vector<cplx> x(n);
            for (size_t i = 0; i < n; ++i) x[i] = cplx(x_re[i], x_im ? x_im[i] : 0.0);
            const auto y = eval_network(std::get<1>(w->w), std::span<const cplx>(x));
            if (out_len < y.size()) throw ShapeError("eval: output buffer too small");
            for (size_t i = 0; i < y.size(); ++i) {
                out_re[i] = y[i].real();
                if (out_im) out_im[i] = y[i].imag();
            }
        } else {
            throw std::invalid_argument("eval: GF(p) weights cannot be evaluated numerically");
        }
        return RATNET_OK;
    });
}

ratnet_status ratnet_hpoly(const ratnet_weights* w, ratnet_poly** out) {
    RATNET_REQUIRE(w && out, "null argument");
    return guarded([&] {
        AnyPoly h = std::visit([](const auto& x) -> AnyPoly { return build_H(x); }, w->w);
        *out = new ratnet_poly{std::move(h)};
        return RATNET_OK;
    });
}

ratnet_status ratnet_factor(const ratnet_poly* p, const ratnet_factor_options* opt, char** out, int* decomposable) {
    RATNET_REQUIRE(p && out, "null argument");
    return guarded([&] {
        const HomPoly<cplx> q = to_complex(p->p);
        FactorReport rep;
        if (opt && opt->binary) {
            const LinearFactorization f = factor_binary_form(q);
            rep.decomposable = true;
            rep.all_real = std::all_of(f.factors.begin(), f.factors.end(), [](const auto& v) {
                return std::all_of(v.begin(), v.end(), [](const cplx& c) { return std::abs(c.imag()) <= 1e-7; });
            });
            rep.factorization = f;
        } else {
            FactorOptions fo;
            if (opt) {
                if (opt->reassembly_tol > 0) fo.reassembly_tol = opt->reassembly_tol;
                fo.seed = opt->seed;
            }
            rep = factor_multilinear(q, fo);
        }
        if (decomposable) *decomposable = rep.decomposable ? 1 : 0;
        *out = dup_string(factor_report_json(rep).dump());
        return RATNET_OK;
    });
}

ratnet_status ratnet_reconstruct(const ratnet_tuple* t, const char* arch, const ratnet_reconstruct_options* opt,
                                 char** out, int* in_model) {
    RATNET_REQUIRE(t && arch && out, "null argument");
    return guarded([&] {
        const Architecture a = Architecture::parse(arch);
        const RationalTuple<cplx> tc = to_complex(t->t);
        const ReconstructOptions o = reconstruct_options(opt);
        MembershipVerdict v;
        const char* method;
        if (a.is_binary() && a.output_dim() == 1) {
            if (tc.numerators.size() != 1) throw ShapeError("reconstruct: binary architecture expects one numerator");
            v = reconstruct_binary(tc.numerators[0], tc.denominator, a.L(), o);
            method = "binary_induction";
        } else if (a.L() == 2) {
            v = reconstruct_shallow(tc.numerators, tc.denominator, a, o);
            method = "shallow_factor_span";
        } else {
            throw std::invalid_argument("reconstruct: no procedure for architecture " + a.to_string());
        }
        if (in_model) *in_model = v.in_model ? 1 : 0;
        *out = dup_string(verdict_json(v, method).dump());
        return RATNET_OK;
    });
}

ratnet_status ratnet_membership(const ratnet_tuple* t, const char* arch, const ratnet_reconstruct_options* opt,
                                char** out, int* in_model) {
    RATNET_REQUIRE(t && arch && out, "null argument");
    return guarded([&] {
        const Architecture a = Architecture::parse(arch);
        const RationalTuple<cplx> tc = to_complex(t->t);
        json j;
        bool ok = false;
        if (a.is_binary() && a.output_dim() >= 2 && a.L() >= 3) {
            const MembershipVerdict v = membership_binary_multioutput(tc.numerators, tc.denominator, a.L(),
                                                                      opt && opt->tol > 0 ? opt->tol : 1e-8);
            j = verdict_json(v, "resultant_screen");
            ok = v.in_model;
        } else if (a.is_binary() && a.output_dim() == 1 && a.L() >= 3) {
            const MembershipVerdict v =
                reconstruct_binary(tc.numerators.at(0), tc.denominator, a.L(), reconstruct_options(opt));
            j = verdict_json(v, "binary_induction");
            ok = v.in_model;
        } else if (a.L() == 2 && !shapes_match(tc, a)) {
            j["method"] = "moment_rank";
            j["in_model"] = false;
            j["stage_failed"] = to_string(Stage::DegreeTest);
            j["detail"] = "tuple degrees or sizes do not match " + a.to_string();
        } else if (a.L() == 2) {
            const RankTest r = rank_test_membership(tc.numerators, tc.denominator, a, opt && opt->tol > 0 ? opt->tol : 1e-10);
            j["method"] = "moment_rank";
            j["in_model"] = r.in_model;
            j["necessary_only"] = r.necessary_only;
            j["rank"] = r.rank;
            j["rank_bound"] = a.dims[1];
            j["singular_values"] = r.singular_values;
            ok = r.in_model;
        } else {
            throw std::invalid_argument("membership: no test for architecture " + a.to_string());
        }
        if (in_model) *in_model = ok ? 1 : 0;
        *out = dup_string(j.dump());
        return RATNET_OK;
    });
}

ratnet_status ratnet_dim(const char* arch, uint64_t prime, uint64_t seed, double timeout_s, char** out, uint64_t* rank) {
    RATNET_REQUIRE(arch && out, "null argument");
    return guarded([&] {
        Deadline d;
        if (timeout_s > 0)
            d = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(timeout_s));
        const DimensionReport r = jacobian_rank_mod_p(Architecture::parse(arch), seed, prime ? prime : kDefaultPrime, d);
        if (rank) *rank = r.jacobian_rank;
        *out = dup_string(dimension_json(r).dump());
        return RATNET_OK;
    });
}

ratnet_status ratnet_census(const ratnet_census_options* opt, ratnet_progress_fn progress, void* user, char** out) {
    RATNET_REQUIRE(opt && out, "null argument");
    return guarded([&] {
        CensusOptions c;
        c.max_params = opt->max_params;
        c.max_layers = opt->max_layers;
        c.max_width = opt->max_width ? opt->max_width : 9;
        c.prime = opt->prime ? opt->prime : kDefaultPrime;
        c.seed = opt->seed;
        c.timeout_s = opt->timeout_s > 0 ? opt->timeout_s : 10.0;
        c.workers = opt->workers ? opt->workers : 1;
        if (!is_prime(c.prime)) throw std::invalid_argument("modulus " + std::to_string(c.prime) + " is not prime");
        std::function<void(const DimensionReport&)> cb;
        if (progress) {
            cb = [&](const DimensionReport& r) {
                const std::string line = r.arch.to_string() + " rank=" + std::to_string(r.jacobian_rank) +
                                         " expected=" + std::to_string(r.conjectured_dim) + " " + r.status;
                progress(line.c_str(), user);
            };
        }
        *out = dup_string(census_csv(census(c, cb)));
        return RATNET_OK;
    });
}

ratnet_status ratnet_census_count(uint64_t max_params, uint32_t max_layers, uint32_t max_width, uint64_t* count) {
    RATNET_REQUIRE(count, "null argument");
    return guarded([&] {
        *count = enumerate_architectures(max_params, max_layers, max_width ? max_width : 9).size();
        return RATNET_OK;
    });
}

ratnet_status ratnet_train(const ratnet_train_options* opt, const char* out_dir, ratnet_progress_fn progress, void* user,
                           char** out) {
    RATNET_REQUIRE(opt && out, "null argument");
    return guarded([&] {
        TrainConfig cfg;
        cfg.lr = opt->lr;
        cfg.epochs = opt->epochs;
        cfg.seed = opt->seed;
        cfg.exclusion_radius = opt->exclusion_radius;
        if (opt->clip > 0) cfg.clip = opt->clip;
        std::function<void(const TrainResult&)> cb;
        if (progress) {
            cb = [&](const TrainResult& r) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "run %zu loss=%.3e angles=(%.2f, %.2f)%s", r.run, r.final_loss,
                              r.angles.at(0), r.angles.at(1), r.error.empty() ? "" : " error");
                progress(buf, user);
            };
        }
        const ExperimentSummary s = run_experiment(cfg, opt->inits, opt->workers ? opt->workers : 1, cb);
        if (out_dir) {
            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (ec) return fail(RATNET_ERR_IO, "cannot create " + std::string(out_dir) + ": " + ec.message());
            auto write = [&](const fs::path& p, const std::string& text) {
                std::ofstream f(p);
                f << text;
                if (!f) throw std::ios_base::failure("cannot write " + p.string());
            };
            try {
                for (const auto& r : s.runs) {
                    char name[32];
                    std::snprintf(name, sizeof name, "run_%03zu", r.run);
                    write(fs::path(out_dir) / (std::string(name) + ".csv"), run_csv(r));
                    json wj;
                    wj["initial"] = to_json(r.initial);
                    wj["final"] = to_json(r.final_weights);
                    write(fs::path(out_dir) / (std::string(name) + "_weights.json"), wj.dump(2));
                }
                write(fs::path(out_dir) / "aggregate.csv", aggregate_csv(s));
            } catch (const std::ios_base::failure& e) {
                return fail(RATNET_ERR_IO, e.what());
            }
        }
        json j;
        j["inits"] = s.runs.size();
        j["epochs"] = cfg.epochs;
        j["lr"] = cfg.lr;
        j["seed"] = cfg.seed;
        j["full_successes"] = s.full_successes;
        j["partial_successes"] = s.partial_successes;
        j["final_losses"] = json::array();
        for (const auto& r : s.runs) j["final_losses"].push_back(std::isfinite(r.final_loss) ? json(r.final_loss) : json(nullptr));
        *out = dup_string(j.dump());
        return RATNET_OK;
    });
}

}  // extern "C"
