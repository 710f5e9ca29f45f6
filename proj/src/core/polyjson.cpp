#include "polyjson.hpp"

namespace ratnet {

namespace {

json exp_json(const Exponents& e) { return json(e); }

template <class T, class Emit>
json poly_json(const HomPoly<T>& p, const char* field, Emit&& emit) {
    json j;
    j["nvars"] = p.nvars();
    j["degree"] = p.degree();
    j["field"] = field;
    j["terms"] = json::array();
    for (const auto& [e, c] : p.terms()) {
        json t;
        t["exp"] = exp_json(e);
        emit(t, c);
        j["terms"].push_back(std::move(t));
    }
    return j;
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    return j.at(key);
}

template <class T, class Read>
HomPoly<T> read_poly(const json& j, Read&& read) {
    try {
        const auto nvars = require(j, "nvars").get<std::size_t>();
        const auto degree = require(j, "degree").get<std::uint32_t>();
        typename HomPoly<T>::TermMap terms;
        for (const auto& t : require(j, "terms")) {
            auto e = require(t, "exp").get<Exponents>();
            T c = read(t);
            auto [it, inserted] = terms.try_emplace(e, c);
            if (!inserted) it->second += c;
        }
        return HomPoly<T>(nvars, degree, std::move(terms));
    } catch (const json::exception& ex) {
        throw ParseError(std::string("malformed polynomial JSON: ") + ex.what());
    } catch (const ShapeError& ex) {
        throw ParseError(std::string("malformed polynomial JSON: ") + ex.what());
    }
}

std::string field_of(const json& j) {
    if (j.contains("field")) return j.at("field").get<std::string>();
    if (j.contains("terms"))
        for (const auto& t : j.at("terms"))
            if (t.contains("im") && t.at("im").get<double>() != 0.0) return "complex";
    return "real";
}

std::uint64_t prime_of(const json& j) {
    const auto p = j.contains("p") ? j.at("p").get<std::uint64_t>() : kDefaultPrime;
    if (!is_prime(p)) throw ParseError("modulus " + std::to_string(p) + " is not prime");
    return p;
}

template <class T, class Read>
Weights<T> read_weights(const json& j, Read&& read) {
    try {
        Weights<T> w;
        w.arch = Architecture(require(j, "arch").get<std::vector<std::size_t>>(),
                              j.value("diagnostic", false));
        const auto& mats = require(j, "mats");
        if (!mats.is_array() || mats.size() != w.arch.L()) throw ParseError("weights: wrong number of matrices");
        for (std::size_t k = 0; k < mats.size(); ++k) {
            const auto& rows = mats[k];
            Matrix<T> m(w.arch.dims[k + 1], w.arch.dims[k]);
            if (rows.size() != m.rows()) throw ParseError("weights: layer " + std::to_string(k + 1) + " has wrong row count");
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (rows[r].size() != m.cols())
                    throw ParseError("weights: layer " + std::to_string(k + 1) + " has wrong column count");
                for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = read(rows[r][c]);
            }
            w.mats.push_back(std::move(m));
        }
        return w;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("malformed weights JSON: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("malformed weights JSON: ") + ex.what());
    }
}

template <class T, class Emit>
json weights_json(const Weights<T>& w, const char* field, Emit&& emit) {
    json j;
    j["arch"] = w.arch.dims;
    j["field"] = field;
    j["mats"] = json::array();
    for (const auto& m : w.mats) {
        json rows = json::array();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(emit(m(r, c)));
            rows.push_back(std::move(row));
        }
        j["mats"].push_back(std::move(rows));
    }
    if (w.prime) j["p"] = w.prime;
    if (w.arch.diagnostic) j["diagnostic"] = true;
    return j;
}

}  // namespace

json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError("expected a number or [re, im]");
}

json to_json(const HomPoly<double>& p) {
    return poly_json(p, "real", [](json& t, double c) { t["re"] = c; });
}

json to_json(const HomPoly<cplx>& p) {
    return poly_json(p, "complex", [](json& t, const cplx& c) {
        t["re"] = c.real();
        if (c.imag() != 0.0) t["im"] = c.imag();
    });
}

json to_json(const HomPoly<Fp>& p) {
    std::uint64_t mod = 0;
    for (const auto& [e, c] : p.terms())
        if (!c.is_literal()) mod = c.modulus();
    json j = poly_json(p, "gfp", [mod](json& t, const Fp& c) {
        t["re"] = mod ? c.value_in(mod) : static_cast<std::uint64_t>(c.literal());
    });
    j["p"] = mod ? mod : kDefaultPrime;
    return j;
}

json to_json(const AnyPoly& p) {
    return std::visit([](const auto& q) { return to_json(q); }, p);
}

AnyPoly poly_from_json(const json& j) {
    const std::string field = field_of(j);
    if (field == "real") {
        return read_poly<double>(j, [](const json& t) {
            if (t.contains("im") && t.at("im").get<double>() != 0.0) throw ParseError("real polynomial with imaginary part");
            return require(t, "re").get<double>();
        });
    }
    if (field == "complex") return complex_poly_from_json(j);
    if (field == "gfp") {
        const std::uint64_t p = prime_of(j);
        return read_poly<Fp>(j, [p](const json& t) {
            const json& v = require(t, "re");
            if (v.is_number_unsigned()) return Fp(v.get<std::uint64_t>(), p);
            return Fp::from_signed(v.get<std::int64_t>(), p);
        });
    }
    throw ParseError("unknown field '" + field + "'");
}

HomPoly<cplx> complex_poly_from_json(const json& j) {
    return read_poly<cplx>(j, [](const json& t) {
        return cplx(require(t, "re").get<double>(), t.value("im", 0.0));
    });
}

json to_json(const AnyTuple& t) {
    return std::visit([](const auto& x) { return to_json(x); }, t);
}

AnyTuple tuple_from_json(const json& j) {
    const auto& nums = require(j, "numerators");
    if (!nums.is_array() || nums.empty()) throw ParseError("tuple: numerators must be a non-empty array");
    AnyPoly den = poly_from_json(require(j, "denominator"));
    std::vector<AnyPoly> ps;
    std::size_t idx = den.index();
    for (const auto& n : nums) {
        ps.push_back(poly_from_json(n));
        idx = std::max(idx, ps.back().index());
    }
    if (idx == 2 || den.index() == 2) {
        RationalTuple<Fp> t;
        for (auto& p : ps) {
            if (p.index() != 2) throw ParseError("tuple mixes GF(p) and floating-point polynomials");
            t.numerators.push_back(std::get<2>(p));
        }
        if (den.index() != 2) throw ParseError("tuple mixes GF(p) and floating-point polynomials");
        t.denominator = std::get<2>(den);
        return t;
    }
    if (idx == 0) {
        RationalTuple<double> t;
        for (auto& p : ps) t.numerators.push_back(std::get<0>(p));
        t.denominator = std::get<0>(den);
        return t;
    }
    RationalTuple<cplx> t;
    for (auto& p : ps) t.numerators.push_back(to_complex(p));
    t.denominator = to_complex(den);
    return t;
}

RationalTuple<cplx> complex_tuple_from_json(const json& j) { return to_complex(tuple_from_json(j)); }

json to_json(const Weights<double>& w) {
    return weights_json(w, "real", [](double v) { return json(v); });
}
json to_json(const Weights<cplx>& w) {
    return weights_json(w, "complex", [](const cplx& v) { return complex_to_json(v); });
}
json to_json(const Weights<Fp>& w) {
    const std::uint64_t p = w.prime ? w.prime : kDefaultPrime;
    return weights_json(w, "gfp", [p](const Fp& v) { return json(v.value_in(p)); });
}
json to_json(const AnyWeights& w) {
    return std::visit([](const auto& x) { return to_json(x); }, w);
}

AnyWeights weights_from_json(const json& j) {
    const std::string field = j.value("field", "real");
    if (field == "real") return read_weights<double>(j, [](const json& v) { return v.get<double>(); });
    if (field == "complex") return read_weights<cplx>(j, [](const json& v) { return complex_from_json(v); });
    if (field == "gfp") {
        const std::uint64_t p = prime_of(j);
        auto w = read_weights<Fp>(j, [p](const json& v) {
            if (v.is_number_unsigned()) return Fp(v.get<std::uint64_t>(), p);
            return Fp::from_signed(v.get<std::int64_t>(), p);
        });
        w.prime = p;
        return w;
    }
    throw ParseError("unknown field '" + field + "'");
}

HomPoly<cplx> to_complex(const AnyPoly& p) {
    if (p.index() == 2) throw ParseError("cannot promote a GF(p) polynomial to complex");
    if (p.index() == 1) return std::get<1>(p);
    return std::get<0>(p).map_coeffs<cplx>([](double c) { return cplx(c, 0.0); });
}

RationalTuple<cplx> to_complex(const AnyTuple& t) {
    if (t.index() == 2) throw ParseError("cannot promote a GF(p) tuple to complex");
    if (t.index() == 1) return std::get<1>(t);
    RationalTuple<cplx> out;
    for (const auto& p : std::get<0>(t).numerators) out.numerators.push_back(to_complex(AnyPoly(p)));
    out.denominator = to_complex(AnyPoly(std::get<0>(t).denominator));
    return out;
}

Weights<cplx> to_complex(const AnyWeights& w) {
    if (w.index() == 2) throw ParseError("cannot promote GF(p) weights to complex");
    if (w.index() == 1) return std::get<1>(w);
    const auto& r = std::get<0>(w);
    Weights<cplx> out;
    out.arch = r.arch;
    for (const auto& m : r.mats) out.mats.push_back(m.map<cplx>([](double v) { return cplx(v, 0.0); }));
    return out;
}

}  // namespace ratnet
