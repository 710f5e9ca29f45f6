// Command-line front end; talks to the library only through the C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ratnet/ratnet.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(ratnet_status s) {
    if (s != RATNET_OK) throw CliError(std::string(ratnet_status_name(s)) + ": " + ratnet_last_error());
}

std::string take(char* s) {
    std::string out = s ? s : "";
    ratnet_string_free(s);
    return out;
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw CliError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(path);
    f << text;
    if (!f) throw CliError("cannot write " + path);
}

std::string pretty(const std::string& compact) { return json::parse(compact).dump(2); }

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
};
using PolyH = Handle<ratnet_poly, ratnet_poly_free>;
using WeightsH = Handle<ratnet_weights, ratnet_weights_free>;
using TupleH = Handle<ratnet_tuple, ratnet_tuple_free>;

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CliError("cannot parse point '" + s + "'");
        }
    }
    return v;
}

void progress_to_stderr(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebra of rational neural networks with activation 1/x"};
    app.set_version_flag("--version", std::string("ratnet ") + ratnet_version());
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    double tol = 0.0;
    app.add_option("--seed", seed, "Seed for every random choice");
    app.add_option("--tol", tol, "Tolerance overriding the command default");

    int exit_code = kExitOk;

    // degrees
    auto* degrees = app.add_subcommand("degrees", "Numerator and denominator degrees of an architecture");
    std::string arch;
    degrees->add_option("--arch", arch, "Widths d0,...,dL")->required();
    degrees->callback([&] {
        std::uint32_t n = 0, m = 0;
        check(ratnet_degrees(arch.c_str(), &n, &m));
        std::cout << "n=" << n << " m=" << m << "\n";
    });

    // forward
    auto* forward = app.add_subcommand("forward", "Coefficient tuple (P_1..P_k, Q) of a network");
    std::string weights_path, out_path, field = "real", save_weights;
    std::uint64_t prime = 0;
    bool binary = false;
    forward->add_option("--weights", weights_path, "Weights JSON file ('-' for stdin)");
    forward->add_option("--arch", arch, "Draw random weights for this architecture");
    forward->add_option("--field", field, "real | complex | gfp (random weights)")
        ->check(CLI::IsMember({"real", "complex", "gfp"}));
    forward->add_option("--prime", prime, "Modulus for gfp");
    forward->add_option("--save-weights", save_weights, "Write the weights used");
    forward->add_flag("--binary", binary, "Use the closed form for (2,...,2,k)");
    forward->add_option("--out", out_path, "Output file (default stdout)");
    forward->callback([&] {
        WeightsH w;
        if (!weights_path.empty())
            check(ratnet_weights_from_json(read_input(weights_path).c_str(), &w.p));
        else if (!arch.empty())
            check(ratnet_weights_random(arch.c_str(), field.c_str(), seed, prime, &w.p));
        else
            throw CliError("forward: give --weights or --arch");
        if (!save_weights.empty()) {
            char* s = nullptr;
            check(ratnet_weights_to_json(w.p, &s));
            write_output(save_weights, pretty(take(s)));
        }
        TupleH t;
        check(ratnet_forward(w.p, binary ? 1 : 0, &t.p));
        char* s = nullptr;
        check(ratnet_tuple_to_json(t.p, &s));
        write_output(out_path, pretty(take(s)));
        check(ratnet_tuple_check(t.p, seed, &s));
        const json c = json::parse(take(s));
        if (c["common_factor_suspected"].is_boolean() && c["common_factor_suspected"].get<bool>())
            std::cerr << "warning: numerators and denominator appear to share a common factor (not cancelled)\n";
    });

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate the network at a point");
    std::string point;
    eval->add_option("--weights", weights_path, "Weights JSON file")->required();
    eval->add_option("--x", point, "Point x1,...,xn")->required();
    eval->callback([&] {
        WeightsH w;
        check(ratnet_weights_from_json(read_input(weights_path).c_str(), &w.p));
        const auto x = parse_point(point);
        char* s = nullptr;
        check(ratnet_weights_to_json(w.p, &s));
        const json wj = json::parse(take(s));
        const std::size_t k = wj["arch"].back().get<std::size_t>();
        std::vector<double> re(k), im(k);
        check(ratnet_eval(w.p, x.data(), nullptr, x.size(), re.data(), im.data(), k));
        json out = json::array();
        const bool complex = wj["field"] == "complex";
        for (std::size_t i = 0; i < k; ++i) out.push_back(complex ? json::array({re[i], im[i]}) : json(re[i]));
        std::cout << out.dump() << "\n";
    });

    // factor
    auto* factor = app.add_subcommand("factor", "Split a homogeneous polynomial into linear forms");
    std::string poly_path;
    factor->add_option("--poly", poly_path, "Polynomial JSON file")->required();
    factor->add_flag("--binary", binary, "Binary-form root factorisation");
    factor->add_option("--out", out_path, "Output file (default stdout)");
    factor->callback([&] {
        PolyH p;
        check(ratnet_poly_from_json(read_input(poly_path).c_str(), &p.p));
        ratnet_factor_options o{tol, seed, binary ? 1 : 0};
        char* s = nullptr;
        int ok = 0;
        check(ratnet_factor(p.p, &o, &s, &ok));
        write_output(out_path, pretty(take(s)));
        exit_code = ok ? kExitOk : kExitNegative;
    });

    // reconstruct / membership
    std::string tuple_path;
    bool real_only = false;
    auto* reconstruct = app.add_subcommand("reconstruct", "Recover weights from a coefficient tuple");
    reconstruct->add_option("--tuple", tuple_path, "Tuple JSON file")->required();
    reconstruct->add_option("--arch", arch, "Target architecture")->required();
    reconstruct->add_flag("--real-only", real_only, "Require a real factorisation");
    reconstruct->add_option("--out", out_path, "Output file (default stdout)");
    reconstruct->add_option("--save-weights", save_weights, "Write the recovered weights");
    reconstruct->callback([&] {
        TupleH t;
        check(ratnet_tuple_from_json(read_input(tuple_path).c_str(), &t.p));
        ratnet_reconstruct_options o{tol, real_only ? 1 : 0, seed};
        char* s = nullptr;
        int in = 0;
        check(ratnet_reconstruct(t.p, arch.c_str(), &o, &s, &in));
        const json verdict = json::parse(take(s));
        write_output(out_path, verdict.dump(2));
        if (!save_weights.empty() && verdict.contains("weights") && !verdict["weights"].is_null())
            write_output(save_weights, verdict["weights"].dump(2));
        exit_code = in ? kExitOk : kExitNegative;
    });

    auto* membership = app.add_subcommand("membership", "Test whether a tuple lies in the neurovariety");
    membership->add_option("--tuple", tuple_path, "Tuple JSON file")->required();
    membership->add_option("--arch", arch, "Target architecture")->required();
    membership->add_option("--out", out_path, "Output file (default stdout)");
    membership->callback([&] {
        TupleH t;
        check(ratnet_tuple_from_json(read_input(tuple_path).c_str(), &t.p));
        ratnet_reconstruct_options o{tol, 0, seed};
        char* s = nullptr;
        int in = 0;
        check(ratnet_membership(t.p, arch.c_str(), &o, &s, &in));
        write_output(out_path, pretty(take(s)));
        exit_code = in ? kExitOk : kExitNegative;
    });

    // dim
    auto* dim = app.add_subcommand("dim", "Neurovariety dimension by Jacobian rank over GF(p)");
    bool as_json = false;
    double timeout = 0.0;
    dim->add_option("--arch", arch, "Widths d0,...,dL")->required();
    dim->add_option("--prime", prime, "Prime modulus (default 2147483647)");
    dim->add_option("--timeout", timeout, "Seconds before giving up (0: none)");
    dim->add_flag("--json", as_json, "Print the full report");
    dim->callback([&] {
        char* s = nullptr;
        std::uint64_t rank = 0;
        check(ratnet_dim(arch.c_str(), prime, seed, timeout, &s, &rank));
        const std::string report = take(s);
        if (as_json)
            std::cout << pretty(report) << "\n";
        else
            std::cout << rank << "\n";
    });

    // census
    auto* census = app.add_subcommand("census", "Dimension of every architecture within bounds, as CSV");
    ratnet_census_options copt{30, 5, 9, 0, 0, 10.0, 1};
    bool quiet = false;
    census->add_option("--max-params", copt.max_params, "Bound on the number of weights");
    census->add_option("--max-layers", copt.max_layers, "Bound on L");
    census->add_option("--max-width", copt.max_width, "Bound on every width");
    census->add_option("--prime", copt.prime, "Prime modulus");
    census->add_option("--timeout", copt.timeout_s, "Seconds per architecture");
    census->add_option("--workers", copt.workers, "Worker threads");
    census->add_option("--out", out_path, "CSV file (default stdout)");
    census->add_flag("--quiet", quiet, "No progress on stderr");
    census->callback([&] {
        copt.seed = seed;
        char* s = nullptr;
        check(ratnet_census(&copt, quiet ? nullptr : progress_to_stderr, nullptr, &s));
        write_output(out_path, take(s));
    });

    // hpoly
    auto* hpoly = app.add_subcommand("hpoly", "H(x, z) for a one-hidden-layer network");
    hpoly->add_option("--weights", weights_path, "Weights JSON file")->required();
    hpoly->add_option("--out", out_path, "Output file (default stdout)");
    hpoly->callback([&] {
        WeightsH w;
        check(ratnet_weights_from_json(read_input(weights_path).c_str(), &w.p));
        PolyH h;
        check(ratnet_hpoly(w.p, &h.p));
        char* s = nullptr;
        check(ratnet_poly_to_json(h.p, &s));
        write_output(out_path, pretty(take(s)));
    });

    // train
    auto* train = app.add_subcommand("train", "Adam training of a (2,2,1) network on 1/(x+y) + 1/(x-y)");
    ratnet_train_options topt{100, 20000, 1e-3, 0, 0.0, 1, 0.0};
    std::string out_dir;
    train->add_option("--inits", topt.inits, "Number of random initialisations");
    train->add_option("--epochs", topt.epochs, "Epochs per run");
    train->add_option("--lr", topt.lr, "Adam learning rate");
    train->add_option("--exclusion-radius", topt.exclusion_radius, "Drop lattice points this close to the pole lines");
    train->add_option("--clip", topt.clip, "Gradient-norm cap (0: off)");
    train->add_option("--workers", topt.workers, "Worker threads");
    train->add_option("--out-dir", out_dir, "Directory for per-run CSV and weights");
    train->add_flag("--quiet", quiet, "No progress on stderr");
    train->callback([&] {
        topt.seed = seed;
        char* s = nullptr;
        check(ratnet_train(&topt, out_dir.empty() ? nullptr : out_dir.c_str(), quiet ? nullptr : progress_to_stderr,
                           nullptr, &s));
        std::cout << pretty(take(s)) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return exit_code;
}
