#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "ratnet/ratnet.h"

using json = nlohmann::json;

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    ratnet_string_free(s);
    return out;
}

const char* kCubic = R"({"nvars":3,"degree":3,"terms":[
  {"exp":[3,0,0],"re":1},{"exp":[1,2,0],"re":-1},{"exp":[1,1,1],"re":-1},
  {"exp":[0,2,1],"re":1},{"exp":[1,0,2],"re":-1},{"exp":[0,1,2],"re":1}]})";

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(ratnet_version()) == "1.0.0");
    CHECK(std::string(ratnet_status_name(RATNET_OK)) == "ok");
    CHECK(std::string(ratnet_status_name(RATNET_ERR_PARSE)) != "");
}

TEST_CASE("architecture arithmetic") {
    uint32_t n = 0, m = 0;
    REQUIRE(ratnet_degrees("2,2,2,1", &n, &m) == RATNET_OK);
    CHECK(n == 3);
    CHECK(m == 2);
    uint64_t N = 0, M = 0;
    CHECK(ratnet_param_count("3,3,3,3", &N) == RATNET_OK);
    CHECK(ratnet_ambient_dim("3,3,3,3", &M) == RATNET_OK);
    CHECK(N == 27);
    CHECK(M == 136);
    CHECK(ratnet_degrees("2,1,2", &n, &m) == RATNET_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(ratnet_last_error()) > 0);
    CHECK(ratnet_degrees("2,,x", &n, &m) != RATNET_OK);
    CHECK(ratnet_degrees(nullptr, &n, &m) == RATNET_ERR_INVALID_ARGUMENT);
}

TEST_CASE("polynomial handles") {
    ratnet_poly* p = nullptr;
    REQUIRE(ratnet_poly_from_json(kCubic, &p) == RATNET_OK);
    char* s = nullptr;
    REQUIRE(ratnet_poly_to_json(p, &s) == RATNET_OK);
    auto j = json::parse(take(s));
    CHECK(j["degree"] == 3);
    CHECK(j["terms"].size() == 6);
    CHECK(j["terms"][0]["exp"] == json::array({3, 0, 0}));

    double x[3] = {1, 1, 1}, re = 5, im = 5;
    CHECK(ratnet_poly_evaluate(p, x, nullptr, 3, &re, &im) == RATNET_OK);
    CHECK(re == 0.0);
    CHECK(im == 0.0);
    CHECK(ratnet_poly_evaluate(p, x, nullptr, 2, &re, &im) == RATNET_ERR_SHAPE);

    ratnet_poly* sq = nullptr;
    CHECK(ratnet_poly_mul(p, p, &sq) == RATNET_OK);
    REQUIRE(ratnet_poly_to_json(sq, &s) == RATNET_OK);
    CHECK(json::parse(take(s))["degree"] == 6);

    int decomposable = 0;
    ratnet_factor_options fo{0.0, 0, 0};
    REQUIRE(ratnet_factor(p, &fo, &s, &decomposable) == RATNET_OK);
    CHECK(decomposable == 1);
    auto rep = json::parse(take(s));
    CHECK(rep["factors"].size() == 3);
    CHECK(rep["all_real"] == true);
    CHECK(rep["residual"].get<double>() <= 1e-10);

    ratnet_poly_free(sq);
    ratnet_poly_free(p);
    ratnet_poly_free(nullptr);

    ratnet_poly* bad = nullptr;
    CHECK(ratnet_poly_from_json("{not json", &bad) == RATNET_ERR_PARSE);
    CHECK(bad == nullptr);
    CHECK(ratnet_poly_from_json(R"({"nvars":2,"degree":2,"terms":[{"exp":[1,0],"re":1}]})", &bad) == RATNET_ERR_PARSE);
}

TEST_CASE("weights, forward, eval, reconstruct") {
    ratnet_weights* w = nullptr;
    REQUIRE(ratnet_weights_random("3,4,2", "complex", 17, 0, &w) == RATNET_OK);
    ratnet_tuple* t = nullptr;
    REQUIRE(ratnet_forward(w, 0, &t) == RATNET_OK);
    CHECK(ratnet_tuple_num_outputs(t) == 2);
    char* s = nullptr;
    REQUIRE(ratnet_tuple_to_json(t, &s) == RATNET_OK);
    const std::string tj = take(s);
    ratnet_tuple* t2 = nullptr;
    REQUIRE(ratnet_tuple_from_json(tj.c_str(), &t2) == RATNET_OK);

    ratnet_reconstruct_options ro{0.0, 0, 3};
    int in_model = 0;
    REQUIRE(ratnet_reconstruct(t2, "3,4,2", &ro, &s, &in_model) == RATNET_OK);
    CHECK(in_model == 1);
    auto v = json::parse(take(s));
    CHECK(v["residual"].get<double>() <= 1e-6);
    CHECK(v["weights"]["arch"] == json::array({3, 4, 2}));

    REQUIRE(ratnet_membership(t2, "3,4,2", &ro, &s, &in_model) == RATNET_OK);
    take(s);
    CHECK(in_model == 1);
    CHECK(ratnet_reconstruct(t2, "3,3,2", &ro, &s, &in_model) == RATNET_OK);
    take(s);
    CHECK(in_model == 0);
    REQUIRE(ratnet_membership(t2, "3,2,2", &ro, &s, &in_model) == RATNET_OK);
    CHECK(json::parse(take(s))["stage_failed"] == "DegreeTest");
    CHECK(in_model == 0);

    double xr[3] = {0.3, 0.7, -1.1}, xi[3] = {0, 0, 0}, outr[2], outi[2];
    CHECK(ratnet_eval(w, xr, xi, 3, outr, outi, 2) == RATNET_OK);
    CHECK(ratnet_eval(w, xr, xi, 3, outr, outi, 1) == RATNET_ERR_SHAPE);

    REQUIRE(ratnet_tuple_check(t, 1, &s) == RATNET_OK);
    CHECK(json::parse(take(s))["common_factor_suspected"] == false);

    ratnet_tuple_free(t2);
    ratnet_tuple_free(t);
    ratnet_weights_free(w);
}

TEST_CASE("binary closed form through the interface") {
    ratnet_weights* w = nullptr;
    REQUIRE(ratnet_weights_random("2,2,2,2,1", "gfp", 5, 0, &w) == RATNET_OK);
    ratnet_tuple *a = nullptr, *b = nullptr;
    REQUIRE(ratnet_forward(w, 0, &a) == RATNET_OK);
    REQUIRE(ratnet_forward(w, 1, &b) == RATNET_OK);
    char *sa = nullptr, *sb = nullptr;
    ratnet_tuple_to_json(a, &sa);
    ratnet_tuple_to_json(b, &sb);
    CHECK(take(sa) == take(sb));
    ratnet_tuple_free(a);
    ratnet_tuple_free(b);
    ratnet_weights_free(w);

    REQUIRE(ratnet_weights_random("3,2,1", "real", 5, 0, &w) == RATNET_OK);
    CHECK(ratnet_forward(w, 1, &a) == RATNET_ERR_SHAPE);
    ratnet_weights_free(w);
    CHECK(ratnet_weights_random("3,2,1", "quaternion", 5, 0, &w) == RATNET_ERR_INVALID_ARGUMENT);
    CHECK(ratnet_weights_random("3,2,1", "gfp", 5, 12, &w) == RATNET_ERR_INVALID_ARGUMENT);
}

TEST_CASE("weights JSON validation") {
    ratnet_weights* w = nullptr;
    CHECK(ratnet_weights_from_json(R"({"arch":[2,2,1],"field":"real","mats":[[[1,0],[0,1]]]})", &w) == RATNET_ERR_PARSE);
    CHECK(ratnet_weights_from_json(R"({"arch":[2,2,1],"field":"real","mats":[[[1,0],[0,1]],[[1,1,1]]]})", &w) ==
          RATNET_ERR_PARSE);
    REQUIRE(ratnet_weights_from_json(R"({"arch":[2,2,1],"field":"real","mats":[[[1,0],[0,1]],[[1,1]]]})", &w) ==
            RATNET_OK);
    double x[2] = {1, 2}, o = 0, oi = 0;
    CHECK(ratnet_eval(w, x, nullptr, 2, &o, &oi, 1) == RATNET_OK);
    CHECK(o == doctest::Approx(1.5));
    double pole[2] = {0, 2};
    CHECK(ratnet_eval(w, pole, nullptr, 2, &o, &oi, 1) == RATNET_ERR_DOMAIN);
    ratnet_poly* h = nullptr;
    REQUIRE(ratnet_hpoly(w, &h) == RATNET_OK);
    char* s = nullptr;
    ratnet_poly_to_json(h, &s);
    CHECK(json::parse(take(s))["nvars"] == 3);
    ratnet_poly_free(h);
    ratnet_weights_free(w);
}

TEST_CASE("dimension and census") {
    char* s = nullptr;
    uint64_t rank = 0;
    REQUIRE(ratnet_dim("3,3,3,3", 0, 7, 0.0, &s, &rank) == RATNET_OK);
    CHECK(rank == 22);
    auto j = json::parse(take(s));
    CHECK(j["ambient_dim"] == 136);
    CHECK(j["param_count"] == 27);
    CHECK(ratnet_dim("3,3,3,3", 15, 7, 0.0, &s, &rank) == RATNET_ERR_INVALID_ARGUMENT);

    uint64_t count = 0;
    CHECK(ratnet_census_count(30, 5, 9, &count) == RATNET_OK);
    CHECK(count == 722);

    ratnet_census_options o{8, 2, 9, 0, 1, 10.0, 2};
    int lines = 0;
    REQUIRE(ratnet_census(&o, [](const char*, void* u) { ++*static_cast<int*>(u); }, &lines, &s) == RATNET_OK);
    const std::string csv = take(s);
    CHECK(csv.find("\"2,2,1\",5,") != std::string::npos);
    CHECK(lines > 0);
}

TEST_CASE("training through the interface") {
    const auto dir = std::filesystem::temp_directory_path() / "ratnet_capi_train";
    std::filesystem::remove_all(dir);
    ratnet_train_options o{2, 50, 1e-3, 9, 0.0, 1, 0.0};
    char* s = nullptr;
    REQUIRE(ratnet_train(&o, dir.string().c_str(), nullptr, nullptr, &s) == RATNET_OK);
    auto j = json::parse(take(s));
    CHECK(j["inits"] == 2);
    CHECK(std::filesystem::exists(dir / "aggregate.csv"));
    CHECK(std::filesystem::exists(dir / "run_000.csv"));
    CHECK(std::filesystem::exists(dir / "run_001_weights.json"));
    o.lr = -1.0;
    CHECK(ratnet_train(&o, nullptr, nullptr, nullptr, &s) == RATNET_ERR_INVALID_ARGUMENT);
    std::filesystem::remove_all(dir);
}
